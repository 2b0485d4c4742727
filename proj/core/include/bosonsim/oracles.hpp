#pragma once

#include <math.h>  // pchip calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "bosonsim/bases.hpp"
#include "bosonsim/states.hpp"

namespace bosonsim {

enum class DistributionFamily { DistanceVortex1, DistanceDipole, DistanceVortex2, Named };

/// Distance law D(d) = d * sum_j coefficients[j] d^{2j} * exp(-d^2/2).
///
/// Every moment of d^{2j+1} e^{-d^2/2} is known in closed form (2^j j!), so the CDF, the
/// mean and the normalisation are exact.
class ClosedFormDistribution {
 public:
  ClosedFormDistribution(DistributionFamily family, double correlation,
                         std::vector<double> coefficients, std::string tag);

  DistributionFamily family() const { return family_; }
  double correlation() const { return correlation_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::string& tag() const { return tag_; }

  double density(double d) const;
  double cdf(double d) const;
  double mean() const;
  /// sum_j coefficients[j] 2^j j!, the exact total mass.
  double analytic_integral() const;

 private:
  DistributionFamily family_;
  double correlation_;
  std::vector<double> coefficients_;
  std::string tag_;
};

/// Vortex pair, ell = 1: (d/16)[(1+2c)(8+d^4) - 16 c d^2] e^{-d^2/2}.
ClosedFormDistribution distance_oracle_vortex1(double c);
/// Dipole pair: (d/32)[(3-2c)(8+d^4) - 8(1-2c) d^2] e^{-d^2/2}.
ClosedFormDistribution distance_oracle_dipole(double c);
/// Vortex pair, ell = 2: (d/1024)[d^8+32d^4+384 + 2c(d^8-32d^6+288d^4-768d^2+384)] e^{-d^2/2}.
ClosedFormDistribution distance_oracle_vortex2(double c);

/// Named reference curves: "ind-donut", "ind-dipole", "fock11", "thermal", "rpcs",
/// "fock11-dipole". Throws ParseError for unknown tags.
ClosedFormDistribution named_distribution(std::string_view tag);

/// Closed-form two-body distance law for a basis, when one exists (vortex ell <= 2, dipole).
ClosedFormDistribution distance_oracle_for(const ModeBasis& basis, double c);

/// Density given on a uniform grid, with a monotone cubic CDF.
class TabulatedDistribution {
 public:
  TabulatedDistribution(double d_max, std::vector<double> density);

  double d_max() const { return d_max_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return density_; }
  double density(double d) const;
  double cdf(double d) const;
  /// Mass captured on [0, d_max] before renormalisation.
  double raw_mass() const { return raw_mass_; }

 private:
  double d_max_;
  std::vector<double> grid_;
  std::vector<double> density_;
  double raw_mass_;
  boost::math::interpolators::pchip<std::vector<double>> density_interp_;
  boost::math::interpolators::pchip<std::vector<double>> cdf_interp_;
};

/// Normalised two-body density sum of C20 |phi_a|^2|phi_a|^2, C02 |phi_b|^2|phi_b|^2 and
/// C11 |phi_a phi_b + phi_b phi_a|^2 terms; coefficients are relative weights.
struct TwoBodyDensity {
  ModeBasis basis;
  double c20 = 0.0;
  double c11 = 0.0;
  double c02 = 0.0;

  double operator()(Point p1, Point p2) const;
  /// True when the density depends on the two points through r1, r2, theta2 - theta1 only.
  bool rotation_invariant() const;
};

/// Two-body density from the state's correlators.
TwoBodyDensity two_body_from_correlators(const StateSpec& state, const ModeBasis& basis);

/// Two-body density as a q = 2 geometry average of products of one-body densities:
/// t-moments taken under the effective two-body measure by Gauss-Legendre quadrature,
/// the relative phase averaged out. Thermal and RPCS states only.
TwoBodyDensity two_body_from_geometry_average(const StateSpec& state, const ModeBasis& basis);

/// D(d) = d * int d^2 r1 int dphi rho2(r1, r1 + d e_phi) by tensor quadrature.
double distance_density(const TwoBodyDensity& rho2, double d);

struct DistanceGrid {
  double d_max = 6.0;
  std::size_t points = 1024;
};

/// Tabulated pair-distance law from the exact two-body density of (state, basis).
TabulatedDistribution quadrature_distance(const StateSpec& state, const ModeBasis& basis,
                                          const DistanceGrid& grid = {});

/// Tabulated pair-distance law for any two-body density.
TabulatedDistribution tabulate_distance(const TwoBodyDensity& rho2, const DistanceGrid& grid = {});

}  // namespace bosonsim
