#pragma once

#include <complex>
#include <concepts>
#include <type_traits>
#include <utility>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bosonsim {

// Two-mode states diagonal in the Fock basis (plus the coherent product state).
// Mode 1 / mode 2 are called `a` / `b` by the bases module.

struct Fock {
  unsigned n1 = 0;
  unsigned n2 = 0;
};

struct Thermal {
  double nbar1 = 1.0;
  double nbar2 = 1.0;
};

/// Random-phase coherent state: fixed moduli, independent uniform phases.
struct Rpcs {
  double a1 = 1.0;
  double a2 = 1.0;
};

struct Coherent {
  std::complex<double> alpha1{1.0, 0.0};
  std::complex<double> alpha2{1.0, 0.0};
};

struct FockSector {
  double weight = 0.0;
  unsigned n1 = 0;
  unsigned n2 = 0;
};

/// Finite mixture of Fock sectors.
struct Mixture {
  std::vector<FockSector> sectors;
};

/// Validated state descriptor. Construction throws InvalidState when an invariant fails.
class StateSpec {
 public:
  using Variant = std::variant<Fock, Thermal, Rpcs, Coherent, Mixture>;

  StateSpec(Variant v);  // NOLINT(google-explicit-constructor)
  template <typename T>
    requires(!std::same_as<std::decay_t<T>, Variant> && !std::same_as<std::decay_t<T>, StateSpec> &&
             std::constructible_from<Variant, T>)
  StateSpec(T&& v)  // NOLINT(google-explicit-constructor)
      : StateSpec(Variant(std::forward<T>(v))) {}

  const Variant& variant() const { return v_; }

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(v_);
  }

  /// True for states whose P function is a genuine probability density.
  bool has_positive_p() const { return is<Thermal>() || is<Rpcs>() || is<Coherent>(); }

  /// Short human-readable tag ("fock", "thermal", ...).
  std::string family() const;

 private:
  Variant v_;
};

/// Normally ordered correlators C_{k,N-k}, k = 0..N, for one order N.
///
/// Entries are stored relative to the largest one (`relative[k] * exp(log_scale)` is the
/// true value) so that high orders of bright states stay representable.
struct CorrelatorTable {
  unsigned order = 0;
  std::vector<double> relative;
  double log_scale = 0.0;

  double value(unsigned k) const;
  /// -inf for vanishing entries.
  double log_value(unsigned k) const;
};

/// C_{k,m} = <(a^dag)^k (b^dag)^m b^m a^k>.
double correlator(const StateSpec& state, unsigned k, unsigned m);

/// ln C_{k,m}; -infinity when the correlator vanishes.
double log_correlator(const StateSpec& state, unsigned k, unsigned m);

CorrelatorTable correlator_table(const StateSpec& state, unsigned order);

/// Two-body parameter C11 / (C20 + 2 C11 + C02). Throws DegenerateState when Z_2 = 0.
double curly_c(const StateSpec& state);

/// Z_q = sum_k binom(q,k) C_{k,q-k}, the q-th factorial moment of the total number.
double z_norm(const StateSpec& state, unsigned q);

/// Discrete q-body sector weights p^(q) for Fock-diagonal mixtures.
struct EffectiveWeights {
  unsigned order = 0;
  std::vector<FockSector> sectors;  ///< weights renormalised to sum to one

  /// Weight of sector (n1, n2), zero when absent.
  double weight(unsigned n1, unsigned n2) const;
};

/// p^(q)_{na,nb} proportional to p_{na,nb} (na+nb)!/(na+nb-q)!. Defined for Fock and Mixture.
EffectiveWeights effective_weights(const StateSpec& state, unsigned q);

/// Law of the intensity fraction t for a two-mode thermal state once the total intensity has
/// been integrated out with weight s^order: density proportional to A(t)^-(order+2) with
/// A(t) = t/nbar1 + (1-t)/nbar2. order = 0 is the bare P law, order = q gives the q-body measure.
class ThermalFractionLaw {
 public:
  ThermalFractionLaw(double nbar1, double nbar2, unsigned order);

  double density(double t) const;
  double cdf(double t) const;
  double quantile(double u) const;
  /// A(t).
  double rate(double t) const { return a0_ + slope_ * t; }
  unsigned order() const { return order_; }

 private:
  double a0_;
  double slope_;
  unsigned order_;
  double norm_;  // integral of A^-(order+2) over [0,1]
};

/// W_N(t), the normalised N-dependent weight of the imbalanced thermal geometry.
double w_thermal_t(double nbar1, double nbar2, unsigned order, double t);

}  // namespace bosonsim
