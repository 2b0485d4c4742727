#include "bosonsim/text_format.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

#include "bosonsim/errors.hpp"

namespace bosonsim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("expected a number, got '" + std::string(s) + "'");
  return v;
}

unsigned to_unsigned(std::string_view s) {
  unsigned v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> arguments(std::string_view body, std::size_t count,
                                        std::string_view family) {
  auto parts = split(body, ',');
  if (parts.size() != count)
    throw ParseError(std::string(family) + " expects " + std::to_string(count) + " values");
  return parts;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

StateSpec parse_state(std::string_view token) {
  token = trim(token);
  const std::size_t colon = token.find(':');
  if (colon == std::string_view::npos) throw ParseError("state token needs 'family:values'");
  const std::string_view family = token.substr(0, colon);
  const std::string_view body = token.substr(colon + 1);
  if (family == "fock") {
    const auto p = arguments(body, 2, family);
    return StateSpec(Fock{to_unsigned(p[0]), to_unsigned(p[1])});
  }
  if (family == "thermal") {
    const auto p = arguments(body, 2, family);
    return StateSpec(Thermal{to_double(p[0]), to_double(p[1])});
  }
  if (family == "rpcs") {
    const auto p = arguments(body, 2, family);
    return StateSpec(Rpcs{to_double(p[0]), to_double(p[1])});
  }
  if (family == "coherent") {
    const auto p = arguments(body, 4, family);
    return StateSpec(Coherent{{to_double(p[0]), to_double(p[1])}, {to_double(p[2]), to_double(p[3])}});
  }
  if (family == "mix") {
    Mixture mix;
    for (std::string_view sector : split(body, ';')) {
      if (sector.empty()) continue;
      const std::size_t star = sector.find('*');
      if (star == std::string_view::npos) throw ParseError("mixture sector needs 'w*n1,n2'");
      const auto p = arguments(sector.substr(star + 1), 2, "mixture sector");
      mix.sectors.push_back({to_double(trim(sector.substr(0, star))), to_unsigned(p[0]),
                             to_unsigned(p[1])});
    }
    return StateSpec(std::move(mix));
  }
  throw ParseError("unknown state family '" + std::string(family) + "'");
}

std::string format_state(const StateSpec& state) {
  struct Visitor {
    std::string operator()(const Fock& f) const {
      return "fock:" + std::to_string(f.n1) + "," + std::to_string(f.n2);
    }
    std::string operator()(const Thermal& t) const {
      return "thermal:" + number(t.nbar1) + "," + number(t.nbar2);
    }
    std::string operator()(const Rpcs& r) const { return "rpcs:" + number(r.a1) + "," + number(r.a2); }
    std::string operator()(const Coherent& c) const {
      return "coherent:" + number(c.alpha1.real()) + "," + number(c.alpha1.imag()) + "," +
             number(c.alpha2.real()) + "," + number(c.alpha2.imag());
    }
    std::string operator()(const Mixture& m) const {
      std::string out = "mix:";
      for (std::size_t i = 0; i < m.sectors.size(); ++i) {
        if (i) out += ";";
        out += number(m.sectors[i].weight) + "*" + std::to_string(m.sectors[i].n1) + "," +
               std::to_string(m.sectors[i].n2);
      }
      return out;
    }
  };
  return std::visit(Visitor{}, state.variant());
}

ModeBasis parse_basis(std::string_view token) {
  token = trim(token);
  if (token == "dipole") return DipolePair{};
  if (token == "mixedlg") return MixedLG{};
  if (token.substr(0, 7) == "vortex:") {
    const unsigned ell = to_unsigned(token.substr(7));
    if (ell == 0) throw InvalidState("vortex charge must be positive");
    return VortexPair{ell};
  }
  throw ParseError("unknown basis '" + std::string(token) + "'");
}

}  // namespace bosonsim
