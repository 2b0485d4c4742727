#include "bosonsim/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bosonsim/errors.hpp"

namespace bosonsim {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_falling(unsigned n, unsigned k) {
  if (k > n) return kNegInf;
  return std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0);
}

// k * ln(x) with the convention 0 * ln(0) = 0.
double log_power(double x, unsigned k) {
  if (k == 0) return 0.0;
  if (x <= 0.0) return kNegInf;
  return k * std::log(x);
}

double log_sum_exp(const std::vector<double>& terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

double log_binomial(unsigned n, unsigned k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void validate(const StateSpec::Variant& v) {
  struct Visitor {
    void operator()(const Fock&) const {}
    void operator()(const Thermal& s) const {
      if (!(s.nbar1 > 0.0) || !(s.nbar2 > 0.0) || !std::isfinite(s.nbar1) ||
          !std::isfinite(s.nbar2))
        throw InvalidState("thermal mean occupations must be finite and strictly positive");
    }
    void operator()(const Rpcs& s) const {
      if (!(s.a1 >= 0.0) || !(s.a2 >= 0.0) || !std::isfinite(s.a1) || !std::isfinite(s.a2))
        throw InvalidState("RPCS amplitude magnitudes must be finite and non-negative");
      if (s.a1 == 0.0 && s.a2 == 0.0) throw InvalidState("RPCS amplitudes are both zero");
    }
    void operator()(const Coherent& s) const {
      if (!std::isfinite(std::abs(s.alpha1)) || !std::isfinite(std::abs(s.alpha2)))
        throw InvalidState("coherent amplitudes must be finite");
      if (std::abs(s.alpha1) == 0.0 && std::abs(s.alpha2) == 0.0)
        throw InvalidState("coherent amplitudes are both zero");
    }
    void operator()(const Mixture& s) const {
      if (s.sectors.empty()) throw InvalidState("mixture has no sectors");
      double total = 0.0;
      for (const auto& sec : s.sectors) {
        if (!(sec.weight >= 0.0) || !std::isfinite(sec.weight))
          throw InvalidState("mixture weights must be non-negative");
        total += sec.weight;
      }
      if (std::abs(total - 1.0) > 1e-12) throw InvalidState("mixture weights must sum to 1");
    }
  };
  std::visit(Visitor{}, v);
}

}  // namespace

StateSpec::StateSpec(Variant v) : v_(std::move(v)) { validate(v_); }

std::string StateSpec::family() const {
  struct Visitor {
    std::string operator()(const Fock&) const { return "fock"; }
    std::string operator()(const Thermal&) const { return "thermal"; }
    std::string operator()(const Rpcs&) const { return "rpcs"; }
    std::string operator()(const Coherent&) const { return "coherent"; }
    std::string operator()(const Mixture&) const { return "mixture"; }
  };
  return std::visit(Visitor{}, v_);
}

double CorrelatorTable::value(unsigned k) const {
  return relative.at(k) * std::exp(log_scale);
}

double CorrelatorTable::log_value(unsigned k) const {
  const double r = relative.at(k);
  return r > 0.0 ? std::log(r) + log_scale : kNegInf;
}

double log_correlator(const StateSpec& state, unsigned k, unsigned m) {
  struct Visitor {
    unsigned k, m;
    double operator()(const Fock& s) const { return log_falling(s.n1, k) + log_falling(s.n2, m); }
    double operator()(const Thermal& s) const {
      return std::lgamma(k + 1.0) + std::lgamma(m + 1.0) + k * std::log(s.nbar1) +
             m * std::log(s.nbar2);
    }
    double operator()(const Rpcs& s) const {
      return log_power(s.a1 * s.a1, k) + log_power(s.a2 * s.a2, m);
    }
    double operator()(const Coherent& s) const {
      return log_power(std::norm(s.alpha1), k) + log_power(std::norm(s.alpha2), m);
    }
    double operator()(const Mixture& s) const {
      std::vector<double> terms;
      terms.reserve(s.sectors.size());
      for (const auto& sec : s.sectors) {
        if (sec.weight <= 0.0) continue;
        terms.push_back(std::log(sec.weight) + log_falling(sec.n1, k) + log_falling(sec.n2, m));
      }
      return log_sum_exp(terms);
    }
  };
  return std::visit(Visitor{k, m}, state.variant());
}

double correlator(const StateSpec& state, unsigned k, unsigned m) {
  return std::exp(log_correlator(state, k, m));
}

CorrelatorTable correlator_table(const StateSpec& state, unsigned order) {
  CorrelatorTable table;
  table.order = order;
  std::vector<double> logs(order + 1);
  for (unsigned k = 0; k <= order; ++k) logs[k] = log_correlator(state, k, order - k);
  const double hi = *std::max_element(logs.begin(), logs.end());
  table.relative.resize(order + 1, 0.0);
  if (hi == kNegInf) {
    table.log_scale = 0.0;
    return table;
  }
  table.log_scale = hi;
  for (unsigned k = 0; k <= order; ++k) table.relative[k] = std::exp(logs[k] - hi);
  return table;
}

double z_norm(const StateSpec& state, unsigned q) {
  std::vector<double> terms(q + 1);
  for (unsigned k = 0; k <= q; ++k)
    terms[k] = log_binomial(q, k) + log_correlator(state, k, q - k);
  const double lz = log_sum_exp(terms);
  return lz == kNegInf ? 0.0 : std::exp(lz);
}

double curly_c(const StateSpec& state) {
  const CorrelatorTable t = correlator_table(state, 2);
  const double z = t.relative[0] + 2.0 * t.relative[1] + t.relative[2];
  if (!(z > 0.0)) throw DegenerateState("state has no two-particle support (Z_2 = 0)");
  return t.relative[1] / z;
}

double EffectiveWeights::weight(unsigned n1, unsigned n2) const {
  double w = 0.0;
  for (const auto& s : sectors)
    if (s.n1 == n1 && s.n2 == n2) w += s.weight;
  return w;
}

EffectiveWeights effective_weights(const StateSpec& state, unsigned q) {
  std::vector<FockSector> raw;
  if (state.is<Fock>()) {
    const auto& f = state.as<Fock>();
    raw.push_back({1.0, f.n1, f.n2});
  } else if (state.is<Mixture>()) {
    raw = state.as<Mixture>().sectors;
  } else {
    throw UnsupportedCombination("discrete effective weights need a Fock or mixture state");
  }
  std::vector<double> logs(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned n = raw[i].n1 + raw[i].n2;
    logs[i] = raw[i].weight > 0.0 ? std::log(raw[i].weight) + log_falling(n, q) : kNegInf;
  }
  const double hi = *std::max_element(logs.begin(), logs.end());
  if (hi == kNegInf)
    throw DegenerateState("no sector supports " + std::to_string(q) + " particles");
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i].weight = std::exp(logs[i] - hi);
    total += raw[i].weight;
  }
  for (auto& s : raw) s.weight /= total;
  return EffectiveWeights{q, std::move(raw)};
}

ThermalFractionLaw::ThermalFractionLaw(double nbar1, double nbar2, unsigned order)
    : a0_(1.0 / nbar2), slope_(1.0 / nbar1 - 1.0 / nbar2), order_(order) {
  if (!(nbar1 > 0.0) || !(nbar2 > 0.0)) throw InvalidState("thermal means must be positive");
  const double m = order + 2.0;
  if (std::abs(slope_) <= 1e-14 * a0_) {
    slope_ = 0.0;
    norm_ = std::pow(a0_, -m);
  } else {
    const double e1 = std::expm1((1.0 - m) * std::log1p(slope_ / a0_));
    norm_ = std::pow(a0_, 1.0 - m) * e1 / ((1.0 - m) * slope_);
  }
}

double ThermalFractionLaw::density(double t) const {
  if (t < 0.0 || t > 1.0) return 0.0;
  return std::pow(rate(t), -(order_ + 2.0)) / norm_;
}

double ThermalFractionLaw::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (slope_ == 0.0) return t;
  const double m = order_ + 2.0;
  return std::expm1((1.0 - m) * std::log1p(slope_ * t / a0_)) /
         std::expm1((1.0 - m) * std::log1p(slope_ / a0_));
}

double ThermalFractionLaw::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (slope_ == 0.0) return u;
  const double m = order_ + 2.0;
  const double e1 = std::expm1((1.0 - m) * std::log1p(slope_ / a0_));
  const double x = std::expm1(std::log1p(u * e1) / (1.0 - m));
  return std::clamp(x * a0_ / slope_, 0.0, 1.0);
}

double w_thermal_t(double nbar1, double nbar2, unsigned order, double t) {
  return ThermalFractionLaw(nbar1, nbar2, order).density(t);
}

}  // namespace bosonsim
