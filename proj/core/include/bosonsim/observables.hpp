#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "bosonsim/bases.hpp"
#include "bosonsim/sampler.hpp"

namespace bosonsim {

double pair_distance(Point p1, Point p2);

/// Perimeter of the polygon obtained by projecting every point onto the circle of `radius`
/// at its polar angle and joining the projections in angular order. Needs at least 3 points;
/// throws DegeneratePoint for a point at the origin.
double projected_perimeter(std::span<const Point> points, double radius = 1.0);

/// Weighted histogram on fixed edges.
struct Histogram {
  std::vector<double> edges;
  std::vector<double> counts;
  double total_weight = 0.0;

  static Histogram uniform(double lo, double hi, std::size_t bins);

  std::size_t bins() const { return counts.size(); }
  void add(double x, double w = 1.0);
  void merge(const Histogram& other);
  /// Normalised density of bin i (integrates to one over the edges).
  double density(std::size_t i) const;
  /// CSV with header bin_lo,bin_hi,density.
  void write_csv(std::ostream& out) const;
};

enum class EstimatorKind { Reweight, TupleAverage, QMeasure };

/// Symmetric q-body kernel evaluated on one unordered tuple.
using TupleKernel = std::function<double(std::span<const Point>)>;

struct WeightedSamples {
  std::vector<double> values;
  std::vector<double> weights;
};

struct Estimate {
  Histogram histogram;
  double mean = 0.0;
  double standard_error = 0.0;
  double total_weight = 0.0;
  std::size_t frames_used = 0;
  std::size_t tuples = 0;
  /// Every tuple value with its estimator weight; kept only when requested.
  WeightedSamples samples;
};

struct EstimateOptions {
  unsigned q = 2;
  Histogram histogram = Histogram::uniform(0.0, 6.0, 200);
  bool keep_samples = false;
  /// Frames holding more than this many q-tuples are rejected.
  std::size_t max_tuples_per_frame = 10'000'000;
};

/// Streaming estimator of a q-body observable over frames.
///
/// Reweight weights frame f by s_f^q (s must be recorded), TupleAverage by binom(M_f, q),
/// QMeasure uniformly; within a frame every unordered q-tuple contributes equally. Frames
/// with fewer than q points carry no tuple and are skipped.
class Estimator {
 public:
  Estimator(EstimatorKind kind, TupleKernel kernel, EstimateOptions options);

  void add(const Frame& frame);
  /// Throws InsufficientMultiplicity when no frame supported q.
  Estimate finish() const;

 private:
  EstimatorKind kind_;
  TupleKernel kernel_;
  EstimateOptions options_;
  Histogram histogram_;
  WeightedSamples samples_;
  std::vector<double> frame_values_;
  std::vector<double> frame_weights_;
  std::size_t tuples_ = 0;
};

Estimate estimate(std::span<const Frame> frames, const TupleKernel& kernel, EstimatorKind kind,
                  const EstimateOptions& options = {});

/// Kernel for pair distances (q = 2) or projected perimeters (q >= 3).
TupleKernel distance_kernel();
TupleKernel perimeter_kernel(double radius = 1.0);

/// sup |F_n - F| between the empirical CDF of raw samples and a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_statistic(const WeightedSamples& samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Weighted mean with the ratio-estimator standard error
/// sqrt(sum w^2 (x - mean)^2) / sum w.
struct WeightedMean {
  double mean = 0.0;
  double standard_error = 0.0;
};
WeightedMean weighted_mean(std::span<const double> values, std::span<const double> weights);

}  // namespace bosonsim
