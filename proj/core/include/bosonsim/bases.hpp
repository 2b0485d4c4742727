#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>

#include "bosonsim/rng.hpp"
#include "bosonsim/states.hpp"

namespace bosonsim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  double r() const { return std::hypot(x, y); }
  double r2() const { return x * x + y * y; }
  double theta() const { return std::atan2(y, x); }
  static Point polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }
};

/// Counter-rotating Laguerre-Gauss pair LG_0^{+ell}, LG_0^{-ell}.
struct VortexPair {
  unsigned ell = 1;
};
/// First-order Hermite-Gauss pair u_x, u_y.
struct DipolePair {};
/// LG_0^{1} (mode a) with LG_1^{0} (mode b).
struct MixedLG {};

using ModeBasis = std::variant<VortexPair, DipolePair, MixedLG>;

std::string basis_name(const ModeBasis& basis);

/// Mode functions phi_a(r), phi_b(r) at one point (waist = 1, dimensionless units).
struct ModeValues {
  std::complex<double> a;
  std::complex<double> b;
};
ModeValues mode_values(const ModeBasis& basis, Point p);

/// Whether |phi_m(r, theta)|-type products split into a shared radial law times angles.
bool radially_separable(const ModeBasis& basis);

/// Radial density g(r) with normalisation int g(r) r dr = 1 shared by every particle
/// (separable bases only): 2 r^{2 ell} e^{-r^2} / ell!.
double radial_weight(const ModeBasis& basis, double r);

/// Angular factors of the modes, normalised on the circle (separable bases only).
ModeValues angular_factors(const ModeBasis& basis, double theta);

/// One symmetry-broken realisation: intensity fraction t of mode a, relative phase /
/// orientation eta, and the total intensity s when it is known.
struct Geometry {
  double t = 0.5;
  double eta = 0.0;
  std::optional<double> s;
  ModeBasis basis = VortexPair{1};
};

/// Coherent amplitudes (unit total intensity) realising a geometry. For the vortex pair,
/// eta acts as a rotation: the pattern depends on theta + eta.
ModeValues geometry_amplitudes(const Geometry& geom);

/// Geometry reproducing the one-body pattern of a fixed coherent amplitude pair.
Geometry geometry_from_amplitudes(const ModeBasis& basis, std::complex<double> alpha1,
                                  std::complex<double> alpha2);

/// Conditioned one-body density (per unit area), integrating to one over the plane.
double one_body_density(const Geometry& geom, Point p);

/// Draw one particle from one_body_density. Throws SamplingStalled after 1e6 rejections.
Point sample_particle(const Geometry& geom, Rng& rng);

/// Phase-averaged one-body density: n1/(n1+n2) |phi_a|^2 + n2/(n1+n2) |phi_b|^2 with the
/// mean occupations of the state. Coherent phases are averaged out as well.
double averaged_one_body(const StateSpec& state, const ModeBasis& basis, Point p);

}  // namespace bosonsim
