#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "bosonsim/errors.hpp"
#include "bosonsim/joint_density.hpp"
#include "bosonsim/quadrature.hpp"
#include "bosonsim/rng.hpp"

namespace bosonsim {
namespace {

using std::numbers::pi;

std::vector<double> random_angles(Rng& rng, unsigned n) {
  std::vector<double> a(n);
  for (double& x : a) x = 2.0 * pi * uniform01(rng);
  return a;
}

std::vector<Point> random_points(Rng& rng, unsigned n) {
  std::normal_distribution<double> g(0.0, 0.9);
  std::vector<Point> p(n);
  for (Point& x : p) x = {g(rng), g(rng)};
  return p;
}

std::vector<StateSpec> states_supporting(unsigned n) {
  std::vector<StateSpec> out = {Thermal{1.0, 1.0}, Thermal{3.5, 1.0}, Rpcs{1.0, 0.6},
                                Coherent{{0.5, 0.5}, {-1.0, 0.2}}, Fock{n, 0}, Fock{n / 2, n - n / 2},
                                Fock{n + 1, 2}, Mixture{{{0.3, n, 1}, {0.7, 1, n}}}};
  return out;
}

TEST(JointDensity, FockPairExample) {
  const AngularDensity d(Fock{1, 1}, VortexPair{1}, 2);
  for (double delta : {0.0, 0.4, pi / 2, 2.0}) {
    const std::vector<double> a = {0.3, 0.3 + delta};
    const double expect = (1.0 + std::cos(2.0 * delta)) / (4.0 * pi * pi);
    EXPECT_NEAR(d.theta_permsum(a), expect, 1e-14);
    EXPECT_NEAR(d.theta_sympoly(a), expect, 1e-14);
  }
  const AngularDensity flat(Fock{2, 0}, VortexPair{1}, 2);
  EXPECT_NEAR(flat.theta_sympoly(std::vector<double>{0.1, 2.9}), 1.0 / (4.0 * pi * pi), 1e-14);
}

TEST(JointDensity, ThermalPairExample) {
  // C20 = 2 nbar1^2, C02 = 2 nbar2^2, C11 = nbar1 nbar2
  const AngularDensity d(Thermal{1.0, 1.0}, VortexPair{1}, 2);
  const double delta = 0.7;
  const double expect = (4.0 + 2.0 * (1.0 + std::cos(2.0 * delta))) / (6.0 * 4.0 * pi * pi);
  EXPECT_NEAR(d.theta_permsum(std::vector<double>{1.0, 1.0 + delta}), expect, 1e-14);
}

TEST(JointDensity, SympolyMatchesPermutationSum) {
  Rng rng = make_stream(3, 0);
  for (const ModeBasis& b : {ModeBasis(VortexPair{1}), ModeBasis(VortexPair{2}), ModeBasis(DipolePair{})})
    for (unsigned n = 2; n <= 6; ++n)
      for (const StateSpec& s : states_supporting(n)) {
        const AngularDensity d(s, b, n);
        for (int trial = 0; trial < 10; ++trial) {
          const auto a = random_angles(rng, n);
          const double p = d.theta_permsum(a), q = d.theta_sympoly(a);
          EXPECT_NEAR(q, p, 1e-10 * std::max(p, 1e-300) + 1e-300)
              << s.family() << " " << basis_name(b) << " N=" << n;
          if (p > 0) EXPECT_NEAR(d.log_theta_sympoly(a), std::log(p), 1e-9);
        }
      }
}

TEST(JointDensity, ExchangeSymmetryAndRotationInvariance) {
  Rng rng = make_stream(3, 1);
  for (const StateSpec& s : states_supporting(5)) {
    const AngularDensity d(s, VortexPair{1}, 5);
    auto a = random_angles(rng, 5);
    const double base = d.theta_sympoly(a);
    std::vector<double> perm = a;
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_NEAR(d.theta_sympoly(perm), base, 1e-12 * base);
    std::vector<double> rot = a;
    for (double& x : rot) x += 0.77;
    EXPECT_NEAR(d.theta_sympoly(rot), base, 1e-12 * base);
  }
}

TEST(JointDensity, AngularNormalisation) {
  for (unsigned n = 1; n <= 3; ++n)
    for (const StateSpec& s : states_supporting(n)) {
      const AngularDensity d(s, VortexPair{1}, n);
      EXPECT_NEAR(quadrature_angular(d, [](std::span<const double>) { return 1.0; }), 1.0, 1e-6)
          << s.family() << " N=" << n;
    }
  const AngularDensity fock21(Fock{2, 1}, VortexPair{2}, 3);
  EXPECT_NEAR(quadrature_angular(fock21, [](std::span<const double>) { return 1.0; }), 1.0, 1e-6);
  const AngularDensity dip(Fock{2, 1}, DipolePair{}, 3);
  EXPECT_NEAR(quadrature_angular(dip, [](std::span<const double>) { return 1.0; }), 1.0, 1e-6);
}

TEST(JointDensity, MarginalMatchesNumericIntegration) {
  const QuadratureRule rule = periodic_trapezoid(64);
  Rng rng = make_stream(3, 2);
  for (const ModeBasis& b : {ModeBasis(VortexPair{1}), ModeBasis(DipolePair{})}) {
    const AngularDensity d(Fock{2, 1}, b, 3);
    const AngularDensity m = d.marginal(2);
    const AngularDensity direct(Fock{2, 1}, b, 2);
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = random_angles(rng, 2);
      const double numeric = rule.integrate([&](double t) {
        const std::vector<double> full = {a[0], a[1], t};
        return d.theta_sympoly(full);
      });
      EXPECT_NEAR(m.theta_sympoly(a), numeric, 1e-8);
      EXPECT_NEAR(direct.theta_sympoly(a), numeric, 1e-8);
    }
  }
  EXPECT_THROW(AngularDensity(Thermal{}, VortexPair{1}, 3).marginal(2), UnsupportedCombination);
}

TEST(JointDensity, PairCorrelationEqualsCurlyC) {
  for (unsigned ell : {1u, 2u})
    for (const StateSpec& s : states_supporting(2)) {
      const AngularDensity d(s, VortexPair{ell}, 2);
      const double mean = quadrature_angular(
          d, [&](std::span<const double> a) { return std::cos(2.0 * ell * (a[0] - a[1])); });
      EXPECT_NEAR(mean, curly_c(s), 1e-8) << s.family();
    }
}

TEST(JointDensity, SpatialNormalisation) {
  for (unsigned n = 2; n <= 3; ++n) {
    for (const StateSpec& s : {StateSpec(Thermal{3.5, 1.0}), StateSpec(Fock{2, 1}), StateSpec(Rpcs{1.0, 0.5})}) {
      EXPECT_NEAR(quadrature_spatial(AngularDensity(s, MixedLG{}, n), [](std::span<const Point>) { return 1.0; }),
                  1.0, 1e-6)
          << s.family() << " N=" << n;
    }
  }
  EXPECT_NEAR(quadrature_spatial(AngularDensity(Fock{1, 1}, DipolePair{}, 2), [](std::span<const Point>) { return 1.0; }),
              1.0, 1e-6);
}

TEST(JointDensity, RhoIsAngularTimesRadial) {
  Rng rng = make_stream(3, 3);
  for (const ModeBasis& b : {ModeBasis(VortexPair{2}), ModeBasis(DipolePair{})}) {
    const AngularDensity d(Fock{2, 1}, b, 3);
    for (int trial = 0; trial < 5; ++trial) {
      const auto pts = random_points(rng, 3);
      std::vector<double> a;
      double radial = 1.0;
      for (Point p : pts) {
        a.push_back(p.theta());
        radial *= radial_weight(b, p.r());
      }
      const double expect = d.theta_sympoly(a) * radial;
      EXPECT_NEAR(d.rho(pts), expect, 1e-12 * expect);
    }
  }
}

// rho_N of a positive-P state equals the s^N-weighted average of products of one-body
// densities over its geometries.
double p_form(const StateSpec& s, const ModeBasis& b, std::span<const Point> pts) {
  const QuadratureRule eta = periodic_trapezoid(64);
  auto at_t = [&](double t) {
    return eta.integrate([&](double e) {
             double prod = 1.0;
             for (Point p : pts) prod *= one_body_density(Geometry{t, e, std::nullopt, b}, p);
             return prod;
           }) /
           (2.0 * pi);
  };
  if (s.is<Rpcs>()) {
    const Rpcs r = s.as<Rpcs>();
    return at_t(r.a1 * r.a1 / (r.a1 * r.a1 + r.a2 * r.a2));
  }
  const Thermal th = s.as<Thermal>();
  const QuadratureRule t = gauss_legendre(48, 0.0, 1.0);
  const unsigned n = static_cast<unsigned>(pts.size());
  return t.integrate([&](double x) { return w_thermal_t(th.nbar1, th.nbar2, n, x) * at_t(x); });
}

TEST(JointDensity, GeometryAverageOfPositiveStates) {
  Rng rng = make_stream(3, 4);
  for (const ModeBasis& b : {ModeBasis(VortexPair{1}), ModeBasis(DipolePair{}), ModeBasis(MixedLG{})})
    for (const StateSpec& s : {StateSpec(Thermal{1.0, 1.0}), StateSpec(Thermal{3.5, 1.0}), StateSpec(Rpcs{1.0, 0.6})}) {
      const AngularDensity d(s, b, 2);
      for (int trial = 0; trial < 4; ++trial) {
        const auto pts = random_points(rng, 2);
        const double expect = p_form(s, b, pts);
        EXPECT_NEAR(d.rho(pts), expect, 1e-6 * expect + 1e-14) << s.family() << " " << basis_name(b);
      }
    }
}

TEST(JointDensity, DipolePairVanishesOnTheXAxis) {
  const AngularDensity d(Fock{1, 1}, DipolePair{}, 2);
  const std::vector<Point> pts = {{0.7, 0.0}, {-1.3, 0.0}};
  EXPECT_NEAR(d.rho(pts), 0.0, 1e-16);
  EXPECT_NEAR(d.theta_sympoly(std::vector<double>{0.0, pi}), 0.0, 1e-16);
}

TEST(JointDensity, OrderLimits) {
  const AngularDensity big(Thermal{}, VortexPair{1}, 13);
  EXPECT_THROW(big.theta_permsum(std::vector<double>(13, 0.1)), OrderTooLarge);
  EXPECT_NO_THROW(big.theta_sympoly(std::vector<double>(13, 0.1)));
  EXPECT_THROW(
      {
        const AngularDensity m(Thermal{}, MixedLG{}, 5);
        m.rho(std::vector<Point>(5, Point{0.3, 0.2}));
      },
      OrderTooLarge);
  EXPECT_THROW(AngularDensity(Fock{1, 1}, VortexPair{1}, 3), DegenerateState);
}

TEST(JointDensity, HundredParticlesStayFinite) {
  const AngularDensity d(Fock{50, 50}, VortexPair{1}, 100);
  const std::vector<double> equal(100, 0.4);
  const double at_equal = d.log_theta_sympoly(equal);
  EXPECT_TRUE(std::isfinite(at_equal));
  Rng rng = make_stream(3, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const double v = d.log_theta_sympoly(random_angles(rng, 100));
    EXPECT_FALSE(std::isnan(v));
    EXPECT_LT(v, std::numeric_limits<double>::infinity());
  }
  const AngularDensity th(Thermal{50.0, 50.0}, VortexPair{1}, 100);
  EXPECT_TRUE(std::isfinite(th.log_theta_sympoly(equal)));
}

TEST(JointDensity, NonNegative) {
  Rng rng = make_stream(3, 6);
  for (unsigned n : {2u, 4u, 7u})
    for (const StateSpec& s : states_supporting(n)) {
      const AngularDensity d(s, DipolePair{}, n);
      for (int trial = 0; trial < 50; ++trial) EXPECT_GE(d.theta_sympoly(random_angles(rng, n)), -1e-15);
    }
}

}  // namespace
}  // namespace bosonsim
