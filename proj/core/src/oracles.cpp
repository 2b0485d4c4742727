#include "bosonsim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bosonsim/errors.hpp"
#include "bosonsim/quadrature.hpp"

namespace bosonsim {
namespace {

using std::numbers::pi;

// int_0^inf d^{2j+1} e^{-d^2/2} dd
double odd_moment(unsigned j) { return std::ldexp(std::tgamma(j + 1.0), static_cast<int>(j)); }

// int_0^x d^{2j+1} e^{-d^2/2} dd = 2^j j! (1 - e^{-y} sum_{i<=j} y^i / i!), y = x^2 / 2
double partial_odd_moment(unsigned j, double x) {
  const double y = 0.5 * x * x;
  double term = 1.0, sum = 1.0;
  for (unsigned i = 1; i <= j; ++i) {
    term *= y / i;
    sum += term;
  }
  return odd_moment(j) * (-std::expm1(-y) - std::exp(-y) * (sum - 1.0));
}

// int_0^inf d^{2j+2} e^{-d^2/2} dd = (2j+1)!! sqrt(pi/2)
double even_moment(unsigned j) {
  double dfact = 1.0;
  for (unsigned i = 1; i <= 2 * j + 1; i += 2) dfact *= i;
  return dfact * std::sqrt(pi / 2.0);
}

}  // namespace

ClosedFormDistribution::ClosedFormDistribution(DistributionFamily family, double correlation,
                                               std::vector<double> coefficients, std::string tag)
    : family_(family), correlation_(correlation), coefficients_(std::move(coefficients)),
      tag_(std::move(tag)) {}

double ClosedFormDistribution::density(double d) const {
  if (d < 0.0) return 0.0;
  const double d2 = d * d;
  double poly = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) poly = poly * d2 + *it;
  return d * poly * std::exp(-0.5 * d2);
}

double ClosedFormDistribution::cdf(double d) const {
  if (d <= 0.0) return 0.0;
  double acc = 0.0;
  for (unsigned j = 0; j < coefficients_.size(); ++j)
    acc += coefficients_[j] * partial_odd_moment(j, d);
  return std::clamp(acc, 0.0, 1.0);
}

double ClosedFormDistribution::mean() const {
  double acc = 0.0;
  for (unsigned j = 0; j < coefficients_.size(); ++j) acc += coefficients_[j] * even_moment(j);
  return acc;
}

double ClosedFormDistribution::analytic_integral() const {
  double acc = 0.0;
  for (unsigned j = 0; j < coefficients_.size(); ++j) acc += coefficients_[j] * odd_moment(j);
  return acc;
}

ClosedFormDistribution distance_oracle_vortex1(double c) {
  return {DistributionFamily::DistanceVortex1, c,
          {(1.0 + 2.0 * c) / 2.0, -c, (1.0 + 2.0 * c) / 16.0}, "vortex1"};
}

ClosedFormDistribution distance_oracle_dipole(double c) {
  return {DistributionFamily::DistanceDipole, c,
          {(3.0 - 2.0 * c) / 4.0, -(1.0 - 2.0 * c) / 4.0, (3.0 - 2.0 * c) / 32.0}, "dipole"};
}

ClosedFormDistribution distance_oracle_vortex2(double c) {
  return {DistributionFamily::DistanceVortex2,
          c,
          {(384.0 + 768.0 * c) / 1024.0, -1536.0 * c / 1024.0, (32.0 + 576.0 * c) / 1024.0,
           -64.0 * c / 1024.0, (1.0 + 2.0 * c) / 1024.0},
          "vortex2"};
}

ClosedFormDistribution named_distribution(std::string_view tag) {
  auto rename = [&](ClosedFormDistribution d) {
    return ClosedFormDistribution(DistributionFamily::Named, d.correlation(), d.coefficients(),
                                  std::string(tag));
  };
  if (tag == "ind-donut") return rename(distance_oracle_vortex1(0.0));
  if (tag == "fock11") return rename(distance_oracle_vortex1(0.5));
  if (tag == "thermal") return rename(distance_oracle_vortex1(1.0 / 6.0));
  if (tag == "rpcs") return rename(distance_oracle_vortex1(0.25));
  if (tag == "ind-dipole") return rename(distance_oracle_dipole(0.0));
  if (tag == "fock11-dipole") return rename(distance_oracle_dipole(0.5));
  throw ParseError("unknown named distribution '" + std::string(tag) + "'");
}

ClosedFormDistribution distance_oracle_for(const ModeBasis& basis, double c) {
  if (const auto* v = std::get_if<VortexPair>(&basis)) {
    if (v->ell == 1) return distance_oracle_vortex1(c);
    if (v->ell == 2) return distance_oracle_vortex2(c);
  } else if (std::holds_alternative<DipolePair>(basis)) {
    return distance_oracle_dipole(c);
  }
  throw UnsupportedCombination("no closed-form distance law for basis " + basis_name(basis));
}

TabulatedDistribution::TabulatedDistribution(double d_max, std::vector<double> density)
    : d_max_(d_max), density_(std::move(density)), raw_mass_(0.0),
      density_interp_({0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 0.0}),
      cdf_interp_({0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 0.0}) {
  const std::size_t n = density_.size();
  if (n < 4) throw InvalidState("tabulated distribution needs at least 4 grid points");
  const double h = d_max_ / static_cast<double>(n - 1);
  grid_.resize(n);
  for (std::size_t i = 0; i < n; ++i) grid_[i] = h * static_cast<double>(i);
  density_interp_ = boost::math::interpolators::pchip<std::vector<double>>(
      std::vector<double>(grid_), std::vector<double>(density_));
  // Exact integral of the cubic Hermite interpolant on each cell.
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double f0 = density_[i], f1 = density_[i + 1];
    const double g0 = density_interp_.prime(grid_[i]), g1 = density_interp_.prime(grid_[i + 1]);
    cumulative[i + 1] = cumulative[i] + 0.5 * h * (f0 + f1) + h * h * (g0 - g1) / 12.0;
  }
  raw_mass_ = cumulative.back();
  if (!(raw_mass_ > 0.0)) throw InvalidState("tabulated distribution has no mass");
  for (double& c : cumulative) c /= raw_mass_;
  for (std::size_t i = 1; i < n; ++i) cumulative[i] = std::max(cumulative[i], cumulative[i - 1]);
  cdf_interp_ = boost::math::interpolators::pchip<std::vector<double>>(std::vector<double>(grid_),
                                                                       std::move(cumulative));
}

double TabulatedDistribution::density(double d) const {
  if (d < 0.0 || d > d_max_) return 0.0;
  return density_interp_(d);
}

double TabulatedDistribution::cdf(double d) const {
  if (d <= 0.0) return 0.0;
  if (d >= d_max_) return 1.0;
  return std::clamp(cdf_interp_(d), 0.0, 1.0);
}

double TwoBodyDensity::operator()(Point p1, Point p2) const {
  const ModeValues u = mode_values(basis, p1);
  const ModeValues v = mode_values(basis, p2);
  const double a1 = std::norm(u.a), b1 = std::norm(u.b);
  const double a2 = std::norm(v.a), b2 = std::norm(v.b);
  const std::complex<double> x1 = u.a * std::conj(u.b);
  const std::complex<double> x2 = v.a * std::conj(v.b);
  const double cross = a1 * b2 + b1 * a2 + 2.0 * std::real(x1 * std::conj(x2));
  return (c20 * a1 * a2 + c02 * b1 * b2 + c11 * cross) / (c20 + 2.0 * c11 + c02);
}

bool TwoBodyDensity::rotation_invariant() const {
  return !std::holds_alternative<DipolePair>(basis);
}

TwoBodyDensity two_body_from_correlators(const StateSpec& state, const ModeBasis& basis) {
  const CorrelatorTable t = correlator_table(state, 2);
  if (!(t.relative[0] + 2.0 * t.relative[1] + t.relative[2] > 0.0))
    throw DegenerateState("state has no two-particle support");
  return TwoBodyDensity{basis, t.relative[2], t.relative[1], t.relative[0]};
}

TwoBodyDensity two_body_from_geometry_average(const StateSpec& state, const ModeBasis& basis) {
  double m20 = 0.0, m11 = 0.0, m02 = 0.0;
  if (state.is<Thermal>()) {
    const auto& th = state.as<Thermal>();
    const ThermalFractionLaw law(th.nbar1, th.nbar2, 2);
    const QuadratureRule rule = gauss_legendre(48, 0.0, 1.0);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double t = rule.nodes[i];
      const double w = rule.weights[i] * law.density(t);
      m20 += w * t * t;
      m11 += w * t * (1.0 - t);
      m02 += w * (1.0 - t) * (1.0 - t);
    }
  } else if (state.is<Rpcs>()) {
    const auto& r = state.as<Rpcs>();
    const double t = r.a1 * r.a1 / (r.a1 * r.a1 + r.a2 * r.a2);
    m20 = t * t;
    m11 = t * (1.0 - t);
    m02 = (1.0 - t) * (1.0 - t);
  } else {
    throw UnsupportedCombination("geometry-average oracle needs a thermal or RPCS state");
  }
  return TwoBodyDensity{basis, m20, m11, m02};
}

double distance_density(const TwoBodyDensity& rho2, double d) {
  if (d < 0.0) return 0.0;
  if (d == 0.0) return 0.0;
  static const QuadratureRule radial = gauss_legendre(64, 0.0, 8.0);
  static const QuadratureRule offset = periodic_trapezoid(128);
  // A global rotation enters a dipole two-body density as a trigonometric polynomial of
  // degree 4, which 8 periodic nodes integrate exactly.
  static const QuadratureRule orientation = periodic_trapezoid(8);
  double acc = 0.0;
  if (rho2.rotation_invariant()) {
    for (std::size_t i = 0; i < radial.size(); ++i) {
      const double r1 = radial.nodes[i];
      const Point p1{r1, 0.0};
      double inner = 0.0;
      for (std::size_t k = 0; k < offset.size(); ++k) {
        const double phi = offset.nodes[k];
        inner += offset.weights[k] * rho2(p1, {r1 + d * std::cos(phi), d * std::sin(phi)});
      }
      acc += radial.weights[i] * r1 * inner;
    }
    return 2.0 * pi * d * acc;
  }
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double r1 = radial.nodes[i];
    double shell = 0.0;
    for (std::size_t j = 0; j < orientation.size(); ++j) {
      const Point p1 = Point::polar(r1, orientation.nodes[j]);
      double inner = 0.0;
      for (std::size_t k = 0; k < offset.size(); ++k) {
        const double phi = offset.nodes[k];
        inner += offset.weights[k] *
                 rho2(p1, {p1.x + d * std::cos(phi), p1.y + d * std::sin(phi)});
      }
      shell += orientation.weights[j] * inner;
    }
    acc += radial.weights[i] * r1 * shell;
  }
  return d * acc;
}

TabulatedDistribution tabulate_distance(const TwoBodyDensity& rho2, const DistanceGrid& grid) {
  std::vector<double> values(grid.points);
  const double h = grid.d_max / static_cast<double>(grid.points - 1);
  for (std::size_t i = 0; i < grid.points; ++i)
    values[i] = distance_density(rho2, h * static_cast<double>(i));
  return TabulatedDistribution(grid.d_max, std::move(values));
}

TabulatedDistribution quadrature_distance(const StateSpec& state, const ModeBasis& basis,
                                          const DistanceGrid& grid) {
  return tabulate_distance(two_body_from_correlators(state, basis), grid);
}

}  // namespace bosonsim
