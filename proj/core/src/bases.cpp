#include "bosonsim/bases.hpp"

#include <numbers>

#include "bosonsim/errors.hpp"

namespace bosonsim {
namespace {

using std::numbers::pi;
constexpr long kRejectionCap = 1'000'000;

double factorial(unsigned n) { return std::tgamma(n + 1.0); }

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * pi);
  return a < 0.0 ? a + 2.0 * pi : a;
}

}  // namespace

std::string basis_name(const ModeBasis& basis) {
  struct Visitor {
    std::string operator()(const VortexPair& v) const { return "vortex:" + std::to_string(v.ell); }
    std::string operator()(const DipolePair&) const { return "dipole"; }
    std::string operator()(const MixedLG&) const { return "mixedlg"; }
  };
  return std::visit(Visitor{}, basis);
}

ModeValues mode_values(const ModeBasis& basis, Point p) {
  const double r2 = p.r2();
  const double gauss = std::exp(-0.5 * r2);
  struct Visitor {
    Point p;
    double r2, gauss;
    ModeValues operator()(const VortexPair& v) const {
      // (x + i y)^ell = r^ell e^{i ell theta}
      const std::complex<double> z(p.x, p.y);
      const std::complex<double> zl = std::pow(z, static_cast<int>(v.ell));
      const double norm = gauss / std::sqrt(pi * factorial(v.ell));
      return {norm * zl, norm * std::conj(zl)};
    }
    ModeValues operator()(const DipolePair&) const {
      const double norm = std::sqrt(2.0 / pi) * gauss;
      return {norm * p.x, norm * p.y};
    }
    ModeValues operator()(const MixedLG&) const {
      const double norm = gauss / std::sqrt(pi);
      return {norm * std::complex<double>(p.x, p.y), norm * (1.0 - r2)};
    }
  };
  return std::visit(Visitor{p, r2, gauss}, basis);
}

bool radially_separable(const ModeBasis& basis) { return !std::holds_alternative<MixedLG>(basis); }

double radial_weight(const ModeBasis& basis, double r) {
  const double r2 = r * r;
  if (const auto* v = std::get_if<VortexPair>(&basis))
    return 2.0 * std::pow(r2, v->ell) * std::exp(-r2) / factorial(v->ell);
  if (std::holds_alternative<DipolePair>(basis)) return 2.0 * r2 * std::exp(-r2);
  throw UnsupportedCombination("mixed LG pair has no separable radial law");
}

ModeValues angular_factors(const ModeBasis& basis, double theta) {
  if (const auto* v = std::get_if<VortexPair>(&basis)) {
    const double norm = 1.0 / std::sqrt(2.0 * pi);
    const std::complex<double> e = std::polar(norm, v->ell * theta);
    return {e, std::conj(e)};
  }
  if (std::holds_alternative<DipolePair>(basis)) {
    const double norm = 1.0 / std::sqrt(pi);
    return {norm * std::cos(theta), norm * std::sin(theta)};
  }
  throw UnsupportedCombination("mixed LG pair has no separable angular factor");
}

ModeValues geometry_amplitudes(const Geometry& geom) {
  const double ma = std::sqrt(geom.t);
  const double mb = std::sqrt(1.0 - geom.t);
  if (const auto* v = std::get_if<VortexPair>(&geom.basis)) {
    const double half = v->ell * geom.eta;
    return {std::polar(ma, half), std::polar(mb, -half)};
  }
  return {std::polar(ma, geom.eta), {mb, 0.0}};
}

Geometry geometry_from_amplitudes(const ModeBasis& basis, std::complex<double> alpha1,
                                  std::complex<double> alpha2) {
  const double n1 = std::norm(alpha1);
  const double n2 = std::norm(alpha2);
  Geometry g;
  g.basis = basis;
  g.s = n1 + n2;
  g.t = n1 / (n1 + n2);
  double delta = 0.0;
  if (n1 > 0.0 && n2 > 0.0) delta = std::arg(alpha1) - std::arg(alpha2);
  if (const auto* v = std::get_if<VortexPair>(&basis)) delta /= 2.0 * v->ell;
  g.eta = wrap_angle(delta);
  return g;
}

double one_body_density(const Geometry& geom, Point p) {
  const ModeValues amp = geometry_amplitudes(geom);
  const ModeValues phi = mode_values(geom.basis, p);
  return std::norm(amp.a * phi.a + amp.b * phi.b);
}

Point sample_particle(const Geometry& geom, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  const double mix = 2.0 * std::sqrt(geom.t * (1.0 - geom.t));

  if (const auto* v = std::get_if<VortexPair>(&geom.basis)) {
    std::gamma_distribution<double> radial(v->ell + 1.0, 1.0);
    const double r = std::sqrt(radial(rng));
    for (long i = 0; i < kRejectionCap; ++i) {
      const double th = angle(rng);
      if (uniform01(rng) * (1.0 + mix) <= 1.0 + mix * std::cos(2.0 * v->ell * (th + geom.eta)))
        return Point::polar(r, th);
    }
    throw SamplingStalled("vortex angular rejection exceeded its iteration cap");
  }

  if (std::holds_alternative<DipolePair>(geom.basis)) {
    std::gamma_distribution<double> radial(2.0, 1.0);
    const double r = std::sqrt(radial(rng));
    const double cross = mix * std::cos(geom.eta);
    for (long i = 0; i < kRejectionCap; ++i) {
      const double th = angle(rng);
      const double c = std::cos(th), s = std::sin(th);
      // quadratic form of the two dipoles on the unit circle, bounded by 1
      const double g = geom.t * c * c + (1.0 - geom.t) * s * s + cross * s * c;
      if (uniform01(rng) <= g) return Point::polar(r, th);
    }
    throw SamplingStalled("dipole rejection exceeded its iteration cap");
  }

  // Mixed LG: envelope e^{-u}(1+u^2)/pi in u = r^2 dominates the density; acceptance 1/3.
  std::exponential_distribution<double> exp1(1.0);
  std::gamma_distribution<double> gamma3(3.0, 1.0);
  for (long i = 0; i < kRejectionCap; ++i) {
    const double u = uniform01(rng) < 1.0 / 3.0 ? exp1(rng) : gamma3(rng);
    const Point p = Point::polar(std::sqrt(u), angle(rng));
    const double envelope = std::exp(-u) * (1.0 + u * u) / pi;
    if (uniform01(rng) * envelope <= one_body_density(geom, p)) return p;
  }
  throw SamplingStalled("mixed LG rejection exceeded its iteration cap");
}

double averaged_one_body(const StateSpec& state, const ModeBasis& basis, Point p) {
  const double n1 = correlator(state, 1, 0);
  const double n2 = correlator(state, 0, 1);
  if (!(n1 + n2 > 0.0)) throw DegenerateState("state has no particles");
  const ModeValues phi = mode_values(basis, p);
  return (n1 * std::norm(phi.a) + n2 * std::norm(phi.b)) / (n1 + n2);
}

}  // namespace bosonsim
