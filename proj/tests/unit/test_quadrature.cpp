#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bosonsim/quadrature.hpp"

namespace bosonsim {
namespace {

using std::numbers::pi;

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  for (std::size_t n : {1u, 2u, 5u, 8u, 17u, 64u}) {
    const QuadratureRule rule = gauss_legendre(n, -0.5, 2.0);
    ASSERT_EQ(rule.size(), n);
    for (unsigned k = 0; k <= 2 * n - 1; ++k) {
      const double exact = (std::pow(2.0, k + 1) - std::pow(-0.5, k + 1)) / (k + 1);
      const double got = rule.integrate([&](double x) { return std::pow(x, k); });
      EXPECT_NEAR(got, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Quadrature, GaussLegendreNodesLieInsideTheInterval) {
  const QuadratureRule rule = gauss_legendre(33, 0.0, 8.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    EXPECT_GT(rule.nodes[i], 0.0);
    EXPECT_LT(rule.nodes[i], 8.0);
    EXPECT_GT(rule.weights[i], 0.0);
  }
}

TEST(Quadrature, GaussLegendreGaussianMoment) {
  const QuadratureRule rule = gauss_legendre(64, 0.0, 8.0);
  // int_0^inf r^3 e^{-r^2} dr = 1/2
  EXPECT_NEAR(rule.integrate([](double r) { return r * r * r * std::exp(-r * r); }), 0.5, 1e-14);
}

TEST(Quadrature, PeriodicTrapezoidIsExactForTrigPolynomials) {
  for (std::size_t n : {4u, 7u, 64u}) {
    const QuadratureRule rule = periodic_trapezoid(n);
    EXPECT_NEAR(rule.integrate([](double) { return 1.0; }), 2.0 * pi, 1e-13);
    for (unsigned k = 1; k < n; ++k) {
      EXPECT_NEAR(rule.integrate([&](double t) { return std::cos(k * t); }), 0.0, 1e-12);
      EXPECT_NEAR(rule.integrate([&](double t) { return std::sin(k * t); }), 0.0, 1e-12);
    }
    EXPECT_NEAR(rule.integrate([&](double t) { return std::cos(n * t); }), 2.0 * pi, 1e-11);
  }
}

}  // namespace
}  // namespace bosonsim
