#include "bosonsim/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "bosonsim/errors.hpp"

namespace bosonsim {
namespace {

using std::numbers::pi;
constexpr long kRejectionCap = 1'000'000;
constexpr std::uint64_t kChainStreamTag = 0x8000000000000000ull;

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * pi);
  return a < 0.0 ? a + 2.0 * pi : a;
}

// Elementary symmetric polynomials of z_j = exp(2 i ell theta_j), rescaled to unit max.
struct SymPoly {
  std::vector<std::complex<double>> e;
  unsigned size = 0;

  explicit SymPoly(unsigned capacity) : e(capacity + 1, 0.0) { e[0] = 1.0; }

  void push(std::complex<double> zeta) {
    ++size;
    for (unsigned k = size; k >= 1; --k) e[k] += zeta * e[k - 1];
    double hi = 0.0;
    for (unsigned k = 0; k <= size; ++k) hi = std::max(hi, std::abs(e[k]));
    if (hi > 0.0)
      for (unsigned k = 0; k <= size; ++k) e[k] /= hi;
  }
};

ConditionalCoefficients coefficients(const SymPoly& poly, const CorrelatorTable& table) {
  // New order j = poly.size + 1; e_j of the old polynomial is zero.
  const unsigned j = poly.size + 1;
  ConditionalCoefficients out;
  for (unsigned k = 0; k <= j; ++k) {
    const double ck = table.relative[k];
    if (ck == 0.0) continue;
    const std::complex<double> ek = k < j ? poly.e[k] : 0.0;
    const std::complex<double> ekm1 = k >= 1 ? poly.e[k - 1] : 0.0;
    out.a += ck * (std::norm(ek) + std::norm(ekm1));
    const std::complex<double> w = std::conj(ek) * ekm1;
    out.b += 2.0 * ck * w.real();
    out.c -= 2.0 * ck * w.imag();
  }
  const double scale = std::max({out.a, std::abs(out.b), std::abs(out.c)});
  if (scale > 0.0) {
    out.a /= scale;
    out.b /= scale;
    out.c /= scale;
  }
  return out;
}

double draw_conditional_angle(const ConditionalCoefficients& k, unsigned ell, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  const double envelope = k.a + std::hypot(k.b, k.c);
  for (long i = 0; i < kRejectionCap; ++i) {
    const double th = angle(rng);
    const double phi = 2.0 * ell * th;
    if (uniform01(rng) * envelope <= k.a + k.b * std::cos(phi) + k.c * std::sin(phi)) return th;
  }
  throw SamplingStalled("conditional angular rejection exceeded its iteration cap");
}

double radius_draw(double shape, Rng& rng) {
  return std::sqrt(std::gamma_distribution<double>(shape, 1.0)(rng));
}

}  // namespace

Geometry sample_geometry(const StateSpec& state, const ModeBasis& basis,
                         std::optional<unsigned> q_order, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  Geometry g;
  g.basis = basis;
  if (state.is<Thermal>()) {
    const auto& th = state.as<Thermal>();
    const unsigned q = q_order.value_or(0);
    const ThermalFractionLaw law(th.nbar1, th.nbar2, q);
    g.t = law.quantile(uniform01(rng));
    g.eta = angle(rng);
    // P(s, t) ds dt ~ s e^{-s A(t)}; the extra s^q of Q_q raises the shape.
    g.s = std::gamma_distribution<double>(q + 2.0, 1.0 / law.rate(g.t))(rng);
    return g;
  }
  if (state.is<Rpcs>()) {
    const auto& r = state.as<Rpcs>();
    const double s = r.a1 * r.a1 + r.a2 * r.a2;
    g.t = r.a1 * r.a1 / s;
    g.eta = angle(rng);
    g.s = s;
    return g;
  }
  if (state.is<Coherent>()) {
    const auto& c = state.as<Coherent>();
    return geometry_from_amplitudes(basis, c.alpha1, c.alpha2);
  }
  throw NotClassicalState("state '" + state.family() + "' has no positive P representation");
}

Frame sample_frame_classical(const SamplerConfig& cfg, std::uint64_t frame_id, Rng& rng) {
  Frame f;
  f.frame_id = frame_id;
  f.geometry = sample_geometry(cfg.state, cfg.basis, cfg.q_weight_order, rng);
  std::size_t m = 0;
  if (const auto* n = std::get_if<unsigned>(&cfg.particles_per_frame)) {
    m = *n;
  } else {
    const double s = f.geometry->s.value_or(0.0);
    m = s > 0.0 ? std::poisson_distribution<std::size_t>(s)(rng) : 0;
  }
  f.points.reserve(m);
  for (std::size_t i = 0; i < m; ++i) f.points.push_back(sample_particle(*f.geometry, rng));
  return f;
}

FockSequentialSampler::FockSequentialSampler(Fock state, unsigned ell, unsigned particles)
    : state_(state), ell_(ell), particles_(particles) {
  if (particles == 0 || particles > state.n1 + state.n2)
    throw InvalidState("a Fock frame holds between 1 and n1 + n2 particles");
  if (ell == 0) throw InvalidState("vortex charge must be positive");
  tables_.reserve(particles);
  for (unsigned j = 1; j <= particles; ++j) tables_.push_back(correlator_table(StateSpec(state), j));
}

ConditionalCoefficients FockSequentialSampler::conditional(std::span<const double> angles) const {
  if (angles.size() >= particles_) throw InvalidState("all particles are already placed");
  SymPoly poly(particles_);
  for (double th : angles) poly.push(std::polar(1.0, 2.0 * ell_ * th));
  return coefficients(poly, tables_[angles.size()]);
}

std::vector<Point> FockSequentialSampler::sample(
    Rng& rng, std::vector<ConditionalCoefficients>* trace) const {
  SymPoly poly(particles_);
  std::vector<Point> points;
  points.reserve(particles_);
  for (unsigned j = 0; j < particles_; ++j) {
    const ConditionalCoefficients k = coefficients(poly, tables_[j]);
    if (trace) trace->push_back(k);
    const double th = draw_conditional_angle(k, ell_, rng);
    poly.push(std::polar(1.0, 2.0 * ell_ * th));
    points.push_back(Point::polar(radius_draw(ell_ + 1.0, rng), th));
  }
  return points;
}

Frame sample_frame_fock(const Fock& state, unsigned particles, const VortexPair& basis,
                        std::uint64_t frame_id, Rng& rng) {
  Frame f;
  f.frame_id = frame_id;
  f.points = FockSequentialSampler(state, basis.ell, particles).sample(rng);
  return f;
}

std::vector<std::vector<double>> mcmc_fallback(const AngularDensity& dens, std::size_t samples,
                                               const McmcConfig& cfg, Rng& rng,
                                               ChainStats* stats) {
  const unsigned n = dens.order();
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  std::normal_distribution<double> step(0.0, cfg.step);
  std::vector<double> current(n), proposal(n);
  for (double& a : current) a = angle(rng);
  double log_p = dens.log_theta_sympoly(current);
  ChainStats local;

  auto advance = [&] {
    for (unsigned j = 0; j < n; ++j) proposal[j] = wrap_angle(current[j] + step(rng));
    const double log_q = dens.log_theta_sympoly(proposal);
    ++local.proposals;
    const double u = uniform01(rng);
    if (log_p == -std::numeric_limits<double>::infinity() || std::log(u) < log_q - log_p) {
      current.swap(proposal);
      log_p = log_q;
      ++local.accepted;
    }
  };

  for (unsigned i = 0; i < cfg.burn_in; ++i) advance();
  std::vector<std::vector<double>> out;
  out.reserve(samples);
  const unsigned thin = std::max(1u, cfg.thinning);
  for (std::size_t s = 0; s < samples; ++s) {
    for (unsigned i = 0; i < thin; ++i) advance();
    out.push_back(current);
  }
  if (stats) *stats = local;
  return out;
}

std::vector<std::vector<Point>> mcmc_points(const AngularDensity& dens, std::size_t samples,
                                            const McmcConfig& cfg, Rng& rng, ChainStats* stats) {
  const unsigned n = dens.order();
  std::normal_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> step(0.0, cfg.step);
  std::vector<Point> current(n), proposal(n);
  for (Point& p : current) p = {unit(rng), unit(rng)};
  auto log_rho = [&](const std::vector<Point>& pts) {
    const double v = dens.rho(pts);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  };
  double log_p = log_rho(current);
  ChainStats local;

  auto advance = [&] {
    for (unsigned j = 0; j < n; ++j)
      proposal[j] = {current[j].x + step(rng), current[j].y + step(rng)};
    const double log_q = log_rho(proposal);
    ++local.proposals;
    const double u = uniform01(rng);
    if (log_p == -std::numeric_limits<double>::infinity() || std::log(u) < log_q - log_p) {
      current.swap(proposal);
      log_p = log_q;
      ++local.accepted;
    }
  };

  for (unsigned i = 0; i < cfg.burn_in; ++i) advance();
  std::vector<std::vector<Point>> out;
  out.reserve(samples);
  const unsigned thin = std::max(1u, cfg.thinning);
  for (std::size_t s = 0; s < samples; ++s) {
    for (unsigned i = 0; i < thin; ++i) advance();
    out.push_back(current);
  }
  if (stats) *stats = local;
  return out;
}

namespace {

enum class Path { Classical, Sequential, AngularChain, PointChain };

// Frames [first, last) of one unit of work; everything a unit needs is derived from the
// config and the unit index.
class FrameFactory {
 public:
  explicit FrameFactory(const SamplerConfig& cfg) : cfg_(cfg) {
    if (cfg.frames == 0) throw InvalidState("a run needs at least one frame");
    if (cfg.state.has_positive_p()) {
      path_ = Path::Classical;
      return;
    }
    const auto* n = std::get_if<unsigned>(&cfg.particles_per_frame);
    if (!n) throw UnsupportedCombination("Poisson multiplicity needs an intensity per geometry");
    particles_ = *n;
    if (cfg.q_weight_order)
      throw UnsupportedCombination("Q_q geometry sampling applies to positive-P states only");
    if (const auto* v = std::get_if<VortexPair>(&cfg.basis)) {
      path_ = Path::Sequential;
      ell_ = v->ell;
      if (cfg.state.is<Fock>()) {
        sequential_.emplace(std::make_pair(cfg.state.as<Fock>().n1, cfg.state.as<Fock>().n2),
                            FockSequentialSampler(cfg.state.as<Fock>(), ell_, particles_));
      } else {
        weights_ = effective_weights(cfg.state, particles_);
        for (const auto& s : weights_.sectors)
          sequential_.emplace(std::make_pair(s.n1, s.n2),
                              FockSequentialSampler(Fock{s.n1, s.n2}, ell_, particles_));
      }
      return;
    }
    density_.emplace(cfg.state, cfg.basis, particles_);
    path_ = std::holds_alternative<DipolePair>(cfg.basis) ? Path::AngularChain : Path::PointChain;
    if (path_ == Path::PointChain && particles_ > AngularDensity::kSpatialCap)
      throw OrderTooLarge("correlated mixed LG frames are capped at 4 particles");
  }

  std::uint64_t unit_size() const {
    return (path_ == Path::AngularChain || path_ == Path::PointChain)
               ? std::max<std::uint64_t>(1, cfg_.mcmc.block)
               : 256;
  }

  std::vector<Frame> make(std::uint64_t unit) const {
    const std::uint64_t first = unit * unit_size();
    const std::uint64_t last = std::min(cfg_.frames, first + unit_size());
    std::vector<Frame> out;
    out.reserve(last - first);
    switch (path_) {
      case Path::Classical:
        for (std::uint64_t id = first; id < last; ++id) {
          Rng rng = make_stream(cfg_.seed, id);
          out.push_back(sample_frame_classical(cfg_, id, rng));
        }
        break;
      case Path::Sequential:
        for (std::uint64_t id = first; id < last; ++id) {
          Rng rng = make_stream(cfg_.seed, id);
          Frame f;
          f.frame_id = id;
          f.points = pick_sector(rng).sample(rng);
          out.push_back(std::move(f));
        }
        break;
      case Path::AngularChain: {
        Rng rng = make_stream(cfg_.seed, kChainStreamTag | unit);
        const auto chain = mcmc_fallback(*density_, last - first, cfg_.mcmc, rng);
        for (std::uint64_t id = first; id < last; ++id) {
          Frame f;
          f.frame_id = id;
          for (double th : chain[id - first])
            f.points.push_back(Point::polar(radius_draw(2.0, rng), th));
          out.push_back(std::move(f));
        }
        break;
      }
      case Path::PointChain: {
        Rng rng = make_stream(cfg_.seed, kChainStreamTag | unit);
        const auto chain = mcmc_points(*density_, last - first, cfg_.mcmc, rng);
        for (std::uint64_t id = first; id < last; ++id) {
          Frame f;
          f.frame_id = id;
          f.points = chain[id - first];
          out.push_back(std::move(f));
        }
        break;
      }
    }
    return out;
  }

  std::uint64_t units() const { return (cfg_.frames + unit_size() - 1) / unit_size(); }
  bool chained() const { return path_ == Path::AngularChain || path_ == Path::PointChain; }

 private:
  const FockSequentialSampler& pick_sector(Rng& rng) const {
    if (sequential_.size() == 1) return sequential_.begin()->second;
    double u = uniform01(rng);
    for (const auto& s : weights_.sectors) {
      u -= s.weight;
      if (u <= 0.0) return sequential_.at({s.n1, s.n2});
    }
    const auto& s = weights_.sectors.back();
    return sequential_.at({s.n1, s.n2});
  }

  const SamplerConfig& cfg_;
  Path path_ = Path::Classical;
  unsigned particles_ = 0;
  unsigned ell_ = 1;
  EffectiveWeights weights_;
  std::map<std::pair<unsigned, unsigned>, FockSequentialSampler> sequential_;
  std::optional<AngularDensity> density_;
};

}  // namespace

void for_each_frame(const SamplerConfig& cfg, unsigned workers,
                    const std::function<void(const Frame&)>& sink) {
  const FrameFactory factory(cfg);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t total = factory.units();
  const std::uint64_t batch = factory.chained() ? std::max<std::uint64_t>(workers, 4) : 64;

  for (std::uint64_t start = 0; start < total; start += batch) {
    const std::uint64_t stop = std::min(total, start + batch);
    std::vector<std::vector<Frame>> results(stop - start);
    std::atomic<std::uint64_t> next{start};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
      try {
        for (std::uint64_t u = next++; u < stop; u = next++) results[u - start] = factory.make(u);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = stop;
      }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, stop - start));
    if (threads <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& unit : results)
      for (const Frame& f : unit) sink(f);
  }
}

std::vector<Frame> generate_frames(const SamplerConfig& cfg, unsigned workers) {
  std::vector<Frame> frames;
  frames.reserve(cfg.frames);
  for_each_frame(cfg, workers, [&](const Frame& f) { frames.push_back(f); });
  return frames;
}

}  // namespace bosonsim
