#include "bosonsim/joint_density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "bosonsim/errors.hpp"
#include "bosonsim/quadrature.hpp"

namespace bosonsim {
namespace {

using std::numbers::pi;
constexpr double kRadialCutoff = 7.0;  // e^{-49} tails are below double precision

double binomial(unsigned n, unsigned k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Masks of `n` bits grouped by popcount; bit j set means particle j sits in mode a.
std::vector<std::vector<unsigned>> masks_by_popcount(unsigned n) {
  std::vector<std::vector<unsigned>> groups(n + 1);
  for (unsigned m = 0; m < (1u << n); ++m) groups[std::popcount(m)].push_back(m);
  return groups;
}

}  // namespace

AngularDensity::AngularDensity(StateSpec state, ModeBasis basis, unsigned order)
    : state_(std::move(state)), basis_(std::move(basis)), order_(order),
      table_(correlator_table(state_, order)), z_relative_(0.0) {
  if (order == 0) throw InvalidState("density order must be at least 1");
  for (unsigned k = 0; k <= order; ++k) z_relative_ += binomial(order, k) * table_.relative[k];
  if (!(z_relative_ > 0.0))
    throw DegenerateState("state supports fewer than " + std::to_string(order) + " particles");
}

double AngularDensity::theta_permsum(std::span<const double> angles) const {
  const unsigned n = order_;
  if (angles.size() != n) throw InvalidState("angle count does not match density order");
  if (n > kPermutationCap) throw OrderTooLarge("permutation sum is capped at 12 particles");
  if (!radially_separable(basis_))
    throw UnsupportedCombination("angular density is undefined for the mixed LG pair");

  const auto groups = masks_by_popcount(n);
  double acc = 0.0;
  if (const auto* v = std::get_if<VortexPair>(&basis_)) {
    // sum_{s1,s2} cos(ell * (sum_i s1(i) theta_i - sum_j s2(j) theta_j))
    std::vector<double> phase(1u << n, 0.0);
    for (unsigned m = 0; m < (1u << n); ++m)
      for (unsigned j = 0; j < n; ++j) phase[m] += ((m >> j) & 1u) ? angles[j] : -angles[j];
    for (unsigned k = 0; k <= n; ++k) {
      if (table_.relative[k] == 0.0) continue;
      double inner = 0.0;
      for (unsigned m1 : groups[k])
        for (unsigned m2 : groups[k]) inner += std::cos(v->ell * (phase[m1] - phase[m2]));
      acc += table_.relative[k] * inner;
    }
    return acc / (std::pow(2.0 * pi, n) * z_relative_);
  }
  // Dipole: prod_j u_{mu1(j)} u_{mu2(j)} restricted to the circle, u_x ~ cos, u_y ~ sin.
  std::vector<double> prod(1u << n, 1.0);
  for (unsigned m = 0; m < (1u << n); ++m)
    for (unsigned j = 0; j < n; ++j)
      prod[m] *= ((m >> j) & 1u) ? std::cos(angles[j]) : std::sin(angles[j]);
  for (unsigned k = 0; k <= n; ++k) {
    if (table_.relative[k] == 0.0) continue;
    double inner = 0.0;
    for (unsigned m1 : groups[k])
      for (unsigned m2 : groups[k]) inner += prod[m1] * prod[m2];
    acc += table_.relative[k] * inner;
  }
  return acc / (std::pow(pi, n) * z_relative_);
}

double AngularDensity::log_theta_sympoly(std::span<const double> angles) const {
  const unsigned n = order_;
  if (angles.size() != n) throw InvalidState("angle count does not match density order");
  if (!radially_separable(basis_))
    throw UnsupportedCombination("angular density is undefined for the mixed LG pair");

  // coefficients of prod_j (b_j + x a_j), rescaled to unit max after each factor
  std::vector<std::complex<double>> e(n + 1, 0.0);
  e[0] = 1.0;
  double log_scale = 0.0;
  for (unsigned j = 0; j < n; ++j) {
    const ModeValues f = angular_factors(basis_, angles[j]);
    for (unsigned k = j + 1; k >= 1; --k) e[k] = f.b * e[k] + f.a * e[k - 1];
    e[0] *= f.b;
    double hi = 0.0;
    for (unsigned k = 0; k <= j + 1; ++k) hi = std::max(hi, std::abs(e[k]));
    if (hi == 0.0) return -std::numeric_limits<double>::infinity();
    for (unsigned k = 0; k <= j + 1; ++k) e[k] /= hi;
    log_scale += std::log(hi);
  }
  double acc = 0.0;
  for (unsigned k = 0; k <= n; ++k) acc += table_.relative[k] * std::norm(e[k]);
  if (acc <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(acc) + 2.0 * log_scale - std::log(z_relative_);
}

double AngularDensity::theta_sympoly(std::span<const double> angles) const {
  return std::exp(log_theta_sympoly(angles));
}

double AngularDensity::rho_permsum(std::span<const Point> points) const {
  const unsigned n = order_;
  std::vector<ModeValues> phi(n);
  for (unsigned j = 0; j < n; ++j) phi[j] = mode_values(basis_, points[j]);
  const auto groups = masks_by_popcount(n);
  double acc = 0.0;
  for (unsigned k = 0; k <= n; ++k) {
    if (table_.relative[k] == 0.0) continue;
    std::complex<double> amp = 0.0;
    for (unsigned m : groups[k]) {
      std::complex<double> term = 1.0;
      for (unsigned j = 0; j < n; ++j) term *= ((m >> j) & 1u) ? phi[j].a : phi[j].b;
      amp += term;
    }
    acc += table_.relative[k] * std::norm(amp);
  }
  return acc / z_relative_;
}

double AngularDensity::rho(std::span<const Point> points) const {
  if (points.size() != order_) throw InvalidState("point count does not match density order");
  if (std::holds_alternative<VortexPair>(basis_)) {
    std::vector<double> angles(order_);
    double log_radial = 0.0;
    for (unsigned j = 0; j < order_; ++j) {
      angles[j] = points[j].theta();
      const double w = radial_weight(basis_, points[j].r());
      if (w == 0.0) return 0.0;
      log_radial += std::log(w);
    }
    return std::exp(log_theta_sympoly(angles) + log_radial);
  }
  if (order_ > kSpatialCap)
    throw OrderTooLarge("non-vortex spatial densities are capped at 4 particles");
  return rho_permsum(points);
}

AngularDensity AngularDensity::marginal(unsigned q) const {
  if (!state_.is<Fock>())
    throw UnsupportedCombination("marginalisation identity holds for Fock states only");
  if (q == 0 || q > order_) throw InvalidState("marginal order must lie in [1, N]");
  return AngularDensity(state_, basis_, q);
}

double theta_eval_permsum(const AngularDensity& dens, std::span<const double> angles) {
  return dens.theta_permsum(angles);
}
double theta_eval_sympoly(const AngularDensity& dens, std::span<const double> angles) {
  return dens.theta_sympoly(angles);
}
double rho_eval(const AngularDensity& dens, std::span<const Point> points) {
  return dens.rho(points);
}

namespace {

// Tensor-product sum over q copies of a one-dimensional rule set.
template <typename Node, typename Eval>
double tensor_sum(const std::vector<Node>& nodes, const std::vector<double>& weights, unsigned q,
                  Eval&& eval) {
  std::vector<std::size_t> idx(q, 0);
  std::vector<Node> tuple(q);
  double acc = 0.0;
  const std::size_t n = nodes.size();
  while (true) {
    double w = 1.0;
    for (unsigned j = 0; j < q; ++j) {
      tuple[j] = nodes[idx[j]];
      w *= weights[idx[j]];
    }
    acc += w * eval(std::span<const Node>(tuple));
    unsigned j = 0;
    while (j < q && ++idx[j] == n) idx[j++] = 0;
    if (j == q) break;
  }
  return acc;
}

}  // namespace

double quadrature_angular(const AngularDensity& dens, const AngularKernel& kernel, double tol) {
  const unsigned q = dens.order();
  if (q > 3) throw OrderTooLarge("angular quadrature oracle supports q <= 3");
  auto integrate = [&](std::size_t n) {
    const QuadratureRule rule = periodic_trapezoid(n);
    return tensor_sum(rule.nodes, rule.weights, q, [&](std::span<const double> a) {
      return kernel(a) * dens.theta_permsum(a);
    });
  };
  std::size_t n = 64;
  double prev = integrate(n);
  const std::size_t cap = q == 3 ? 256 : 4096;
  while (n < cap) {
    n *= 2;
    const double next = integrate(n);
    if (std::abs(next - prev) < tol) return next;
    prev = next;
  }
  throw QuadratureNotConverged("angular quadrature did not converge");
}

double quadrature_spatial(const AngularDensity& dens, const SpatialKernel& kernel, double tol) {
  const unsigned q = dens.order();
  if (q > 3) throw OrderTooLarge("spatial quadrature oracle supports q <= 3");
  // Per particle the density is a trigonometric polynomial in theta of degree 2 ell (vortex)
  // or 2 (dipole, mixed LG); `exact` trapezoid nodes integrate it without error.
  const auto* vortex = std::get_if<VortexPair>(&dens.basis());
  const std::size_t exact = 2 * (vortex ? 2 * vortex->ell : 2) + 2;
  auto integrate = [&](std::size_t n_r, std::size_t n_theta) {
    const QuadratureRule radial = gauss_legendre(n_r, 0.0, kRadialCutoff);
    const QuadratureRule angular = periodic_trapezoid(n_theta);
    std::vector<Point> nodes;
    std::vector<double> weights;
    for (std::size_t i = 0; i < radial.size(); ++i)
      for (std::size_t j = 0; j < angular.size(); ++j) {
        nodes.push_back(Point::polar(radial.nodes[i], angular.nodes[j]));
        weights.push_back(radial.weights[i] * radial.nodes[i] * angular.weights[j]);
      }
    return tensor_sum(nodes, weights, q,
                      [&](std::span<const Point> p) { return kernel(p) * dens.rho(p); });
  };
  // Three-particle grids keep the angular rule at its exactness limit, so q = 3 kernels must
  // be trigonometric polynomials of low degree; lower orders refine both directions.
  std::size_t n_r = q == 3 ? 20 : 32;
  std::size_t n_theta = q == 3 ? exact : std::max<std::size_t>(32, exact);
  double prev = integrate(n_r, n_theta);
  const int max_refinements = 2;
  for (int i = 0; i < max_refinements; ++i) {
    n_r = n_r * 3 / 2;
    if (q < 3) n_theta = n_theta * 3 / 2;
    const double next = integrate(n_r, n_theta);
    if (std::abs(next - prev) < tol) return next;
    prev = next;
  }
  throw QuadratureNotConverged("spatial quadrature did not converge");
}

}  // namespace bosonsim
