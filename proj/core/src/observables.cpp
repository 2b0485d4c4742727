#include "bosonsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <ostream>

#include "bosonsim/errors.hpp"

namespace bosonsim {
namespace {

using std::numbers::pi;

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

// Visit every unordered q-subset of points in lexicographic order.
template <typename F>
void for_each_tuple(std::span<const Point> points, unsigned q, F&& f) {
  const std::size_t m = points.size();
  if (q == m) {
    f(points);
    return;
  }
  std::vector<std::size_t> idx(q);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Point> tuple(q);
  while (true) {
    for (unsigned j = 0; j < q; ++j) tuple[j] = points[idx[j]];
    f(std::span<const Point>(tuple));
    int j = static_cast<int>(q) - 1;
    while (j >= 0 && idx[j] == m - q + j) --j;
    if (j < 0) return;
    ++idx[j];
    for (unsigned i = j + 1; i < q; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

double pair_distance(Point p1, Point p2) { return std::hypot(p1.x - p2.x, p1.y - p2.y); }

double projected_perimeter(std::span<const Point> points, double radius) {
  if (points.size() < 3) throw InvalidState("a projected polygon needs at least 3 points");
  std::vector<double> angles;
  angles.reserve(points.size());
  for (const Point& p : points) {
    if (p.x == 0.0 && p.y == 0.0) throw DegeneratePoint("point at the origin has no angle");
    angles.push_back(p.theta());
  }
  std::sort(angles.begin(), angles.end());
  double perimeter = 0.0;
  for (std::size_t i = 0; i + 1 < angles.size(); ++i)
    perimeter += std::sin(0.5 * (angles[i + 1] - angles[i]));
  perimeter += std::sin(0.5 * (angles.front() + 2.0 * pi - angles.back()));
  return 2.0 * radius * perimeter;
}

Histogram Histogram::uniform(double lo, double hi, std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw InvalidState("histogram needs hi > lo and at least one bin");
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0.0);
  return h;
}

void Histogram::add(double x, double w) {
  total_weight += w;
  if (x < edges.front() || x >= edges.back()) return;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  counts[static_cast<std::size_t>(it - edges.begin()) - 1] += w;
}

void Histogram::merge(const Histogram& other) {
  if (other.edges != edges) throw InvalidState("cannot merge histograms with different edges");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  total_weight += other.total_weight;
}

double Histogram::density(std::size_t i) const {
  if (total_weight <= 0.0) return 0.0;
  return counts[i] / (total_weight * (edges[i + 1] - edges[i]));
}

void Histogram::write_csv(std::ostream& out) const {
  out << "bin_lo,bin_hi,density\n";
  char line[96];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", edges[i], edges[i + 1], density(i));
    out << line;
  }
}

Estimator::Estimator(EstimatorKind kind, TupleKernel kernel, EstimateOptions options)
    : kind_(kind), kernel_(std::move(kernel)), options_(std::move(options)),
      histogram_(options_.histogram) {
  if (options_.q == 0) throw InvalidState("observable order must be positive");
  histogram_.counts.assign(histogram_.counts.size(), 0.0);
  histogram_.total_weight = 0.0;
}

void Estimator::add(const Frame& frame) {
  const std::size_t m = frame.multiplicity();
  const unsigned q = options_.q;
  if (m < q) return;
  const double n_tuples = binomial(m, q);
  if (n_tuples > static_cast<double>(options_.max_tuples_per_frame))
    throw InvalidState("frame holds too many q-tuples to enumerate");

  double frame_weight = 1.0;
  switch (kind_) {
    case EstimatorKind::Reweight:
      if (!frame.geometry || !frame.geometry->s)
        throw MissingIntensity("reweighting needs the total intensity of every frame");
      frame_weight = std::pow(*frame.geometry->s, q);
      break;
    case EstimatorKind::TupleAverage:
      frame_weight = n_tuples;
      break;
    case EstimatorKind::QMeasure:
      frame_weight = 1.0;
      break;
  }
  const double tuple_weight = frame_weight / n_tuples;
  double sum = 0.0;
  for_each_tuple(frame.points, q, [&](std::span<const Point> tuple) {
    const double v = kernel_(tuple);
    sum += v;
    histogram_.add(v, tuple_weight);
    if (options_.keep_samples) {
      samples_.values.push_back(v);
      samples_.weights.push_back(tuple_weight);
    }
  });
  tuples_ += static_cast<std::size_t>(n_tuples);
  frame_values_.push_back(sum / n_tuples);
  frame_weights_.push_back(frame_weight);
}

Estimate Estimator::finish() const {
  if (frame_values_.empty())
    throw InsufficientMultiplicity("no frame holds " + std::to_string(options_.q) + " points");
  Estimate e;
  e.histogram = histogram_;
  const WeightedMean wm = weighted_mean(frame_values_, frame_weights_);
  e.mean = wm.mean;
  e.standard_error = wm.standard_error;
  e.total_weight = std::accumulate(frame_weights_.begin(), frame_weights_.end(), 0.0);
  e.frames_used = frame_values_.size();
  e.tuples = tuples_;
  e.samples = samples_;
  return e;
}

Estimate estimate(std::span<const Frame> frames, const TupleKernel& kernel, EstimatorKind kind,
                  const EstimateOptions& options) {
  Estimator est(kind, kernel, options);
  for (const Frame& f : frames) est.add(f);
  return est.finish();
}

TupleKernel distance_kernel() {
  return [](std::span<const Point> t) {
    if (t.size() != 2) throw InvalidState("pair distance is a two-body observable");
    return pair_distance(t[0], t[1]);
  };
}

TupleKernel perimeter_kernel(double radius) {
  return [radius](std::span<const Point> t) { return projected_perimeter(t, radius); };
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidState("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic(const WeightedSamples& samples, const std::function<double(double)>& cdf) {
  const std::size_t n = samples.values.size();
  if (n == 0) throw InvalidState("KS statistic of an empty sample");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return samples.values[a] < samples.values[b]; });
  const double total = std::accumulate(samples.weights.begin(), samples.weights.end(), 0.0);
  double below = 0.0, d = 0.0;
  for (std::size_t i : order) {
    const double f = cdf(samples.values[i]);
    d = std::max(d, f - below / total);
    below += samples.weights[i];
    d = std::max(d, below / total - f);
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidState("KS statistic of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

WeightedMean weighted_mean(std::span<const double> values, std::span<const double> weights) {
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sw += weights[i];
    swx += weights[i] * values[i];
  }
  if (!(sw > 0.0)) throw InvalidState("weighted mean with no positive weight");
  const double mean = swx / sw;
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dx = values[i] - mean;
    var += weights[i] * weights[i] * dx * dx;
  }
  return {mean, std::sqrt(var) / sw};
}

}  // namespace bosonsim
