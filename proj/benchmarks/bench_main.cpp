#include <benchmark/benchmark.h>

#include <vector>

#include "bosonsim/joint_density.hpp"
#include "bosonsim/observables.hpp"
#include "bosonsim/oracles.hpp"
#include "bosonsim/sampler.hpp"

namespace {

using namespace bosonsim;

std::vector<double> angles(unsigned n) {
  Rng rng = make_stream(1, n);
  std::vector<double> a(n);
  for (double& x : a) x = 6.283185307179586 * uniform01(rng);
  return a;
}

void BM_ThetaPermsum(benchmark::State& st) {
  const unsigned n = static_cast<unsigned>(st.range(0));
  const AngularDensity d(Fock{n / 2, n - n / 2}, VortexPair{1}, n);
  const auto a = angles(n);
  for (auto _ : st) benchmark::DoNotOptimize(d.theta_permsum(a));
}
BENCHMARK(BM_ThetaPermsum)->DenseRange(2, 12, 2);

void BM_ThetaSympoly(benchmark::State& st) {
  const unsigned n = static_cast<unsigned>(st.range(0));
  const AngularDensity d(Fock{n / 2, n - n / 2}, VortexPair{1}, n);
  const auto a = angles(n);
  for (auto _ : st) benchmark::DoNotOptimize(d.log_theta_sympoly(a));
}
BENCHMARK(BM_ThetaSympoly)->DenseRange(2, 12, 2)->Arg(50)->Arg(100);

void BM_FockSequentialFrame(benchmark::State& st) {
  const unsigned n = static_cast<unsigned>(st.range(0));
  const FockSequentialSampler s(Fock{n / 2, n - n / 2}, 1, n);
  Rng rng = make_stream(2, 0);
  for (auto _ : st) benchmark::DoNotOptimize(s.sample(rng));
}
BENCHMARK(BM_FockSequentialFrame)->Arg(2)->Arg(10)->Arg(100);

void BM_ClassicalFrame(benchmark::State& st) {
  SamplerConfig cfg{Thermal{1.0, 1.0}};
  cfg.particles_per_frame = static_cast<unsigned>(st.range(0));
  Rng rng = make_stream(3, 0);
  std::uint64_t id = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_frame_classical(cfg, id++, rng));
}
BENCHMARK(BM_ClassicalFrame)->Arg(2)->Arg(100);

void BM_PairDistanceRun(benchmark::State& st) {
  SamplerConfig cfg{Thermal{1.0, 1.0}};
  cfg.frames = 100'000;
  for (auto _ : st) {
    double acc = 0.0;
    for_each_frame(cfg, 1, [&](const Frame& f) { acc += pair_distance(f.points[0], f.points[1]); });
    benchmark::DoNotOptimize(acc);
  }
  st.SetItemsProcessed(st.iterations() * cfg.frames);
}
BENCHMARK(BM_PairDistanceRun)->Unit(benchmark::kMillisecond);

void BM_ClosedFormCdf(benchmark::State& st) {
  const auto f = named_distribution("thermal");
  double d = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(f.cdf(d));
    d = d > 6.0 ? 0.0 : d + 1e-3;
  }
}
BENCHMARK(BM_ClosedFormCdf);

}  // namespace

BENCHMARK_MAIN();
