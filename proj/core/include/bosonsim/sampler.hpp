#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "bosonsim/bases.hpp"
#include "bosonsim/joint_density.hpp"
#include "bosonsim/rng.hpp"
#include "bosonsim/states.hpp"

namespace bosonsim {

/// One shot: the geometry it was drawn from (absent on the correlated path) and its points.
struct Frame {
  std::uint64_t frame_id = 0;
  std::optional<Geometry> geometry;
  std::vector<Point> points;

  std::size_t multiplicity() const { return points.size(); }
};

/// Multiplicity drawn as Poisson(s) from the frame's total intensity.
struct PoissonFromGeometry {};
using Multiplicity = std::variant<unsigned, PoissonFromGeometry>;

struct McmcConfig {
  unsigned burn_in = 1000;
  unsigned thinning = 10;
  double step = 0.5;  ///< Gaussian proposal width (radians, or waists for point chains)
  /// Frames per independent chain. Chains are seeded by block index, so output does not
  /// depend on the worker count.
  unsigned block = 4096;
};

struct SamplerConfig {
  StateSpec state;
  ModeBasis basis = VortexPair{1};
  Multiplicity particles_per_frame = 2u;
  std::uint64_t frames = 1;
  std::uint64_t seed = 0;
  /// Draw geometries from the q-body measure Q_q instead of the P law.
  std::optional<unsigned> q_weight_order;
  McmcConfig mcmc;
};

/// Geometry from the state's P law, or from Q_q when `q_order` is given.
/// Thermal: t by inverse CDF, s | t ~ Gamma(q + 2, rate A(t)); RPCS: fixed t; coherent: fixed
/// t and eta. Throws NotClassicalState for Fock and mixture states.
Geometry sample_geometry(const StateSpec& state, const ModeBasis& basis,
                         std::optional<unsigned> q_order, Rng& rng);

/// Geometry-first frame for a positive-P state; points i.i.d. given the geometry.
Frame sample_frame_classical(const SamplerConfig& cfg, std::uint64_t frame_id, Rng& rng);

/// Step coefficients of the sequential conditional density A + B cos(2 ell theta) +
/// C sin(2 ell theta) (unnormalised, rescaled).
struct ConditionalCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Exact chain-rule sampler for Fock states in a vortex basis. Particle j is drawn from the
/// ratio of the order-j and order-(j-1) densities; radii are i.i.d. Gamma(ell + 1) in r^2.
class FockSequentialSampler {
 public:
  FockSequentialSampler(Fock state, unsigned ell, unsigned particles);

  std::vector<Point> sample(Rng& rng, std::vector<ConditionalCoefficients>* trace = nullptr) const;

  /// Conditional coefficients for the next particle given the already placed angles.
  ConditionalCoefficients conditional(std::span<const double> angles) const;

 private:
  Fock state_;
  unsigned ell_;
  unsigned particles_;
  std::vector<CorrelatorTable> tables_;  // orders 1..particles
};

/// Frame of `particles` correlated points for a Fock state in a vortex basis.
Frame sample_frame_fock(const Fock& state, unsigned particles, const VortexPair& basis,
                        std::uint64_t frame_id, Rng& rng);

/// Metropolis chain on [0, 2 pi)^N targeting the angular density. Returns `samples` tuples
/// after burn-in, keeping every `thinning`-th state.
struct ChainStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double acceptance() const { return proposals ? double(accepted) / double(proposals) : 0.0; }
};
std::vector<std::vector<double>> mcmc_fallback(const AngularDensity& dens, std::size_t samples,
                                               const McmcConfig& cfg, Rng& rng,
                                               ChainStats* stats = nullptr);

/// Metropolis chain on the plane^N targeting the spatial density (non-separable bases).
std::vector<std::vector<Point>> mcmc_points(const AngularDensity& dens, std::size_t samples,
                                            const McmcConfig& cfg, Rng& rng,
                                            ChainStats* stats = nullptr);

/// Frames of a run in frame_id order. Frames are produced in fixed-size chunks spread over
/// `workers` threads; each frame (or MCMC block) has its own stream, so output is
/// independent of `workers`. `sink` is called from the calling thread only.
void for_each_frame(const SamplerConfig& cfg, unsigned workers,
                    const std::function<void(const Frame&)>& sink);

std::vector<Frame> generate_frames(const SamplerConfig& cfg, unsigned workers = 1);

}  // namespace bosonsim
