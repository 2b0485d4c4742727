#pragma once

#include <functional>
#include <span>

#include "bosonsim/bases.hpp"
#include "bosonsim/states.hpp"

namespace bosonsim {

/// Exact normalised N-body density of a Fock-diagonal two-mode state in a mode basis.
///
/// For every diagonal state the unnormalised density is
///   sum_k C_{k,N-k} |E_k|^2,   E_k = [x^k] prod_j (phi_b(r_j) + x phi_a(r_j)),
/// which is the permutation double sum over sign strings regrouped by elementary symmetric
/// polynomials. Two independent routes are kept: the explicit permutation sum (oracle,
/// N <= 12) and the O(N^2) polynomial recursion (any N).
///
/// Angular evaluations need a radially separable basis (vortex, dipole); the spatial `rho`
/// works for every basis.
class AngularDensity {
 public:
  static constexpr unsigned kPermutationCap = 12;
  static constexpr unsigned kSpatialCap = 4;

  AngularDensity(StateSpec state, ModeBasis basis, unsigned order);

  unsigned order() const { return order_; }
  const StateSpec& state() const { return state_; }
  const ModeBasis& basis() const { return basis_; }
  const CorrelatorTable& correlators() const { return table_; }

  /// Explicit double sum over the sign-string permutations. Throws OrderTooLarge above 12.
  double theta_permsum(std::span<const double> angles) const;

  /// Elementary-symmetric-polynomial form; equals theta_permsum wherever both exist.
  double theta_sympoly(std::span<const double> angles) const;
  double log_theta_sympoly(std::span<const double> angles) const;

  /// Spatial density per unit area of each particle. Vortex: any N; other bases: N <= 4.
  double rho(std::span<const Point> points) const;

  /// q-particle marginal. Only Fock states, for which it is the order-q density of the
  /// same state.
  AngularDensity marginal(unsigned q) const;

 private:
  double rho_permsum(std::span<const Point> points) const;

  StateSpec state_;
  ModeBasis basis_;
  unsigned order_;
  CorrelatorTable table_;
  double z_relative_;  // sum_k binom(N,k) relative[k]
};

double theta_eval_permsum(const AngularDensity& dens, std::span<const double> angles);
double theta_eval_sympoly(const AngularDensity& dens, std::span<const double> angles);
double rho_eval(const AngularDensity& dens, std::span<const Point> points);

using AngularKernel = std::function<double(std::span<const double>)>;
using SpatialKernel = std::function<double(std::span<const Point>)>;

/// Integral of kernel * Theta over [0, 2pi)^q, q <= 3. Periodic trapezoid per angle starting
/// at 64 nodes and doubling until two refinements differ by less than `tol`.
double quadrature_angular(const AngularDensity& dens, const AngularKernel& kernel,
                          double tol = 1e-6);

/// Integral of kernel * rho over the plane^q, q <= 3 (Gauss-Legendre in r on [0, 7],
/// periodic trapezoid in theta), refined until two successive grids agree within `tol`.
/// For q = 3 only the radial rule is refined: the kernel must be a low-degree
/// trigonometric polynomial in each angle.
double quadrature_spatial(const AngularDensity& dens, const SpatialKernel& kernel,
                          double tol = 1e-6);

}  // namespace bosonsim
