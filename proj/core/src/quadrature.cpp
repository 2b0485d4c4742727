#include "bosonsim/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <numbers>

namespace bosonsim {

QuadratureRule gauss_legendre(std::size_t n, double lo, double hi) {
  // legendre_p_zeros returns the non-negative roots of P_n in ascending order.
  const std::vector<double> roots = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  QuadratureRule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  auto push = [&](double x) {
    const double dp = boost::math::legendre_p_prime(static_cast<int>(n), x);
    rule.nodes.push_back(mid + half * x);
    rule.weights.push_back(half * 2.0 / ((1.0 - x * x) * dp * dp));
  };
  for (double x : roots) {
    if (x == 0.0) {
      push(0.0);
    } else {
      push(x);
      push(-x);
    }
  }
  return rule;
}

QuadratureRule periodic_trapezoid(std::size_t n) {
  QuadratureRule rule;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes.push_back(h * static_cast<double>(i));
    rule.weights.push_back(h);
  }
  return rule;
}

}  // namespace bosonsim
