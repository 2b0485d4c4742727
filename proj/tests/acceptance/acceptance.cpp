// End-to-end checks of the simulator against its analytic references. One PASS/FAIL line
// per criterion; the exit status is non-zero when a criterion fails that was not declared
// a known deviation with --known-failing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bosonsim/bases.hpp"
#include "bosonsim/joint_density.hpp"
#include "bosonsim/observables.hpp"
#include "bosonsim/oracles.hpp"
#include "bosonsim/quadrature.hpp"
#include "bosonsim/sampler.hpp"
#include "bosonsim/states.hpp"

namespace {

using namespace bosonsim;
using std::numbers::pi;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

unsigned g_workers = 0;

// Pair distances of `frames` two-particle frames.
std::vector<double> pair_distances(SamplerConfig cfg, std::uint64_t frames, unsigned workers = g_workers) {
  cfg.frames = frames;
  cfg.particles_per_frame = 2u;
  std::vector<double> d;
  d.reserve(frames);
  for_each_frame(cfg, workers, [&](const Frame& f) { d.push_back(pair_distance(f.points[0], f.points[1])); });
  return d;
}

std::function<double(double)> cdf_of(const ClosedFormDistribution& f) {
  return [f](double d) { return f.cdf(d); };
}

std::vector<double> g_thermal_pairs;

Outcome criterion1() {
  SamplerConfig cfg{Thermal{1.0, 1.0}};
  cfg.seed = 101;
  const auto t0 = Clock::now();
  g_thermal_pairs = pair_distances(cfg, 1'000'000, 1);
  const double secs = seconds_since(t0);
  const double ks = ks_statistic(g_thermal_pairs, cdf_of(named_distribution("thermal")));
  return {ks < 0.005 && secs < 30.0, "KS=" + fmt("%.5f", ks) + " (<0.005), single-thread sampling " +
                                         fmt("%.1f", secs) + " s (<30 s)"};
}

Outcome criterion2() {
  SamplerConfig rp{Rpcs{1.0, 1.0}};
  rp.seed = 201;
  const auto d = pair_distances(rp, 1'000'000);
  const double ks = ks_statistic(d, cdf_of(named_distribution("rpcs")));
  // one fixed Hermite-Gauss geometry, every particle independent
  SamplerConfig dip{Coherent{{1.0, 0.0}, {0.0, 0.0}}, DipolePair{}};
  dip.seed = 202;
  const auto e = pair_distances(dip, 1'000'000);
  const double ks2 = ks_two_sample(d, e);
  return {ks < 0.005 && ks2 < 0.005,
          "KS vs rpcs=" + fmt("%.5f", ks) + " (<0.005), two-sample vs fixed dipole=" + fmt("%.5f", ks2) + " (<0.005)"};
}

Outcome criterion3() {
  SamplerConfig cfg{Fock{1, 1}};
  cfg.seed = 301;
  const auto d = pair_distances(cfg, 1'000'000);
  const double ks = ks_statistic(d, cdf_of(named_distribution("fock11")));
  if (g_thermal_pairs.empty()) {
    SamplerConfig th{Thermal{1.0, 1.0}};
    th.seed = 101;
    g_thermal_pairs = pair_distances(th, 1'000'000);
  }
  const double ks2 = ks_two_sample(d, g_thermal_pairs);
  return {ks < 0.005 && ks2 > 0.05,
          "KS vs fock11=" + fmt("%.5f", ks) + " (<0.005), two-sample vs thermal=" + fmt("%.4f", ks2) + " (>0.05)"};
}

Outcome criterion4() {
  SamplerConfig cfg{Coherent{{1.0, 0.0}, {0.0, 1.0}}, DipolePair{}};
  cfg.seed = 401;
  const double ks = ks_statistic(pair_distances(cfg, 1'000'000), cdf_of(named_distribution("ind-donut")));
  return {ks < 0.005, "KS vs ind-donut=" + fmt("%.5f", ks) + " (<0.005)"};
}

Outcome criterion5() {
  SamplerConfig th{Thermal{1.0, 1.0}, VortexPair{2}};
  th.seed = 501;
  const double ks_th = ks_statistic(pair_distances(th, 1'000'000), cdf_of(distance_oracle_vortex2(1.0 / 6)));
  SamplerConfig fk{Fock{1, 1}, VortexPair{2}};
  fk.seed = 502;
  const double ks_fk = ks_statistic(pair_distances(fk, 1'000'000), cdf_of(distance_oracle_vortex2(0.5)));
  return {ks_th < 0.005 && ks_fk < 0.005,
          "thermal KS=" + fmt("%.5f", ks_th) + ", fock11 KS=" + fmt("%.5f", ks_fk) + " (<0.005 each)"};
}

Outcome criterion6() {
  SamplerConfig cfg{Fock{1, 1}, DipolePair{}};
  cfg.seed = 601;
  const double ks = ks_statistic(pair_distances(cfg, 100'000), cdf_of(named_distribution("fock11-dipole")));
  return {ks < 0.01, "MCMC KS vs fock11-dipole=" + fmt("%.5f", ks) + " (<0.01) at 1e5 thinned samples"};
}

Outcome criterion7() {
  const StateSpec state(Thermal{3.5, 1.0});
  const std::uint64_t frames = 100'000;
  EstimateOptions keep;
  keep.keep_samples = true;

  SamplerConfig p{state};
  p.frames = frames;
  p.seed = 701;
  Estimator reweight(EstimatorKind::Reweight, distance_kernel(), {});
  for_each_frame(p, g_workers, [&](const Frame& f) { reweight.add(f); });

  SamplerConfig poisson = p;
  poisson.particles_per_frame = PoissonFromGeometry{};
  poisson.seed = 702;
  Estimator tuples(EstimatorKind::TupleAverage, distance_kernel(), {});
  for_each_frame(poisson, g_workers, [&](const Frame& f) { tuples.add(f); });

  SamplerConfig q2 = p;
  q2.q_weight_order = 2u;
  q2.seed = 703;
  Estimator qmeasure(EstimatorKind::QMeasure, distance_kernel(), keep);
  for_each_frame(q2, g_workers, [&](const Frame& f) { qmeasure.add(f); });

  const Estimate a = reweight.finish(), b = tuples.finish(), c = qmeasure.finish();
  auto agree = [](const Estimate& x, const Estimate& y) {
    return std::abs(x.mean - y.mean) <= 3.0 * std::hypot(x.standard_error, y.standard_error);
  };
  const bool means_ok = agree(a, b) && agree(a, c) && agree(b, c);

  const TabulatedDistribution oracle = tabulate_distance(two_body_from_geometry_average(state, VortexPair{1}));
  const double ks = ks_statistic(c.samples, [&](double d) { return oracle.cdf(d); });
  return {means_ok && ks < 0.01,
          "means reweight=" + fmt("%.5f", a.mean) + "+-" + fmt("%.5f", a.standard_error) + " tuples=" +
              fmt("%.5f", b.mean) + "+-" + fmt("%.5f", b.standard_error) + " qmeasure=" + fmt("%.5f", c.mean) +
              "+-" + fmt("%.5f", c.standard_error) + (means_ok ? " (agree within 3 SE)" : " (DISAGREE)") +
              "; W2 quadrature KS=" + fmt("%.5f", ks) + " (<0.01)"};
}

Outcome criterion8() {
  Rng rng = make_stream(801, 0);
  const std::vector<StateSpec> families = {Thermal{3.5, 1.0}, Rpcs{1.0, 0.7}, Coherent{{0.4, 0.3}, {1.0, -0.2}},
                                           Fock{4, 3}, Mixture{{{0.4, 3, 3}, {0.6, 6, 1}}}};
  double worst = 0.0;
  for (const ModeBasis& b : {ModeBasis(VortexPair{1}), ModeBasis(VortexPair{2}), ModeBasis(DipolePair{})})
    for (const StateSpec& s : families)
      for (unsigned n = 1; n <= 6; ++n) {
        const AngularDensity d(s, b, n);
        for (int t = 0; t < 100; ++t) {
          std::vector<double> a(n);
          for (double& x : a) x = 2.0 * pi * uniform01(rng);
          const double p = theta_eval_permsum(d, a), q = theta_eval_sympoly(d, a);
          // relative to the value, or to the uniform level (2 pi)^-N near zeros of the density
          worst = std::max(worst, std::abs(p - q) / std::max(std::abs(p), std::pow(2.0 * pi, -double(n))));
        }
      }
  double worst_marg = 0.0;
  const QuadratureRule ring = periodic_trapezoid(64);
  for (const ModeBasis& b : {ModeBasis(VortexPair{1}), ModeBasis(DipolePair{})})
    for (const Fock& f : {Fock{2, 2}, Fock{3, 1}, Fock{1, 1}, Fock{4, 0}})
      for (unsigned n = 2; n <= std::min(4u, f.n1 + f.n2); ++n) {
        const AngularDensity full(f, b, n);
        const AngularDensity lower(f, b, n - 1);
        for (int t = 0; t < 20; ++t) {
          std::vector<double> a(n - 1);
          for (double& x : a) x = 2.0 * pi * uniform01(rng);
          const double integral = ring.integrate([&](double th) {
            std::vector<double> all = a;
            all.push_back(th);
            return full.theta_sympoly(all);
          });
          worst_marg = std::max(worst_marg, std::abs(integral - lower.theta_sympoly(a)));
        }
      }
  return {worst < 1e-10 && worst_marg < 1e-8,
          "max sympoly/permsum gap=" + fmt("%.2e", worst) + " (<1e-10), max marginal gap=" +
              fmt("%.2e", worst_marg) + " (<1e-8)"};
}

std::vector<double> perimeters(SamplerConfig cfg, std::uint64_t frames) {
  cfg.frames = frames;
  cfg.particles_per_frame = 100u;
  std::vector<double> out;
  out.reserve(frames);
  for_each_frame(cfg, g_workers, [&](const Frame& f) { out.push_back(projected_perimeter(f.points)); });
  return out;
}

Outcome criterion9() {
  const auto t0 = Clock::now();
  SamplerConfig fock{Fock{50, 50}};
  fock.seed = 901;
  SamplerConfig rpcs{Rpcs{1.0, 1.0}};
  rpcs.seed = 902;
  SamplerConfig thermal{Thermal{50.0, 50.0}};
  thermal.seed = 903;
  thermal.q_weight_order = 100u;
  const auto pf = perimeters(fock, 10'000), pr = perimeters(rpcs, 10'000), pt = perimeters(thermal, 10'000);
  const double secs = seconds_since(t0);
  const double fr = ks_two_sample(pf, pr), ft = ks_two_sample(pf, pt), rt = ks_two_sample(pr, pt);
  return {fr < 0.02 && ft > 0.05 && rt > 0.05 && secs < 600.0,
          "KS fock/rpcs=" + fmt("%.4f", fr) + " (<0.02), fock/thermal=" + fmt("%.4f", ft) + ", rpcs/thermal=" +
              fmt("%.4f", rt) + " (>0.05), " + fmt("%.1f", secs) + " s"};
}

Outcome criterion10() {
  double worst_closed = 0.0;
  for (double c : {0.0, 0.1, 1.0 / 6, 0.25, 0.4, 0.5})
    for (const auto& f : {distance_oracle_vortex1(c), distance_oracle_dipole(c), distance_oracle_vortex2(c)})
      worst_closed = std::max(worst_closed, std::abs(f.analytic_integral() - 1.0));
  for (const char* tag : {"ind-donut", "ind-dipole", "fock11", "thermal", "rpcs", "fock11-dipole"})
    worst_closed = std::max(worst_closed, std::abs(named_distribution(tag).analytic_integral() - 1.0));

  const QuadratureRule radial = gauss_legendre(64, 0.0, 8.0);
  const QuadratureRule ring = periodic_trapezoid(64);
  double worst_one = 0.0;
  for (const ModeBasis& b : {ModeBasis(VortexPair{1}), ModeBasis(VortexPair{2}), ModeBasis(DipolePair{}), ModeBasis(MixedLG{})})
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j < 8; ++j) {
        const Geometry g{i / 10.0, 2.0 * pi * j / 8.0, std::nullopt, b};
        double acc = 0.0;
        for (std::size_t k = 0; k < radial.size(); ++k)
          acc += radial.weights[k] * radial.nodes[k] *
                 ring.integrate([&](double th) { return one_body_density(g, Point::polar(radial.nodes[k], th)); });
        worst_one = std::max(worst_one, std::abs(acc - 1.0));
      }

  double worst_joint = 0.0;
  const std::vector<StateSpec> states = {Thermal{1, 1}, Thermal{3.5, 1}, Rpcs{1, 0.5}, Fock{2, 1}, Fock{1, 1}, Fock{3, 0},
                                         Mixture{{{0.5, 1, 1}, {0.5, 2, 2}}}};
  for (const StateSpec& s : states)
    for (unsigned n = 1; n <= 3; ++n) {
      if (z_norm(s, n) <= 0.0) continue;
      for (const ModeBasis& b : {ModeBasis(VortexPair{1}), ModeBasis(DipolePair{})})
        worst_joint = std::max(worst_joint, std::abs(quadrature_angular(AngularDensity(s, b, n),
                                                                        [](std::span<const double>) { return 1.0; }) -
                                                     1.0));
      worst_joint = std::max(worst_joint, std::abs(quadrature_spatial(AngularDensity(s, MixedLG{}, n),
                                                                      [](std::span<const Point>) { return 1.0; }) -
                                                   1.0));
    }
  return {worst_closed < 1e-12 && worst_one < 1e-8 && worst_joint < 1e-6,
          "closed forms |mass-1|<=" + fmt("%.1e", worst_closed) + ", one-body <=" + fmt("%.1e", worst_one) +
              " (<1e-8), joint N<=3 <=" + fmt("%.1e", worst_joint) + " (<1e-6)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string report_path;
  std::vector<unsigned> known_failing;
  std::vector<unsigned> only;
  app.add_option("--report", report_path, "Also write the result lines to this file");
  app.add_option("--known-failing", known_failing, "Criteria whose failure is a documented deviation");
  app.add_option("--only", only, "Run just these criteria");
  app.add_option("--workers", g_workers, "Worker threads for sampling, 0 = logical cores");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9, criterion10};
  const std::set<unsigned> known(known_failing.begin(), known_failing.end());
  const std::set<unsigned> selected(only.begin(), only.end());
  std::ostringstream lines;
  bool ok = true;
  for (unsigned i = 1; i <= criteria.size(); ++i) {
    if (!selected.empty() && !selected.count(i)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::string status = o.pass ? "PASS" : "FAIL";
    if (!o.pass && known.count(i))
      status += " (known deviation)";
    else if (!o.pass)
      ok = false;
    const std::string line = "criterion " + std::to_string(i) + ": " + status + "  " + o.detail + "  [" +
                             fmt("%.1f", seconds_since(t0)) + " s]";
    std::cout << line << std::endl;
    lines << line << "\n";
  }
  if (!report_path.empty()) std::ofstream(report_path) << lines.str();
  return ok ? 0 : 1;
}
