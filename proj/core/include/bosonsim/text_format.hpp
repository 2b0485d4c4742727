#pragma once

#include <string>
#include <string_view>

#include "bosonsim/bases.hpp"
#include "bosonsim/states.hpp"

namespace bosonsim {

/// State tokens:
///   fock:n1,n2   thermal:nbar1,nbar2   rpcs:a1,a2   coherent:re1,im1,re2,im2
///   mix:w*n1,n2;w*n1,n2;...
/// Throws ParseError on malformed text and InvalidState when the values are out of range.
StateSpec parse_state(std::string_view token);
std::string format_state(const StateSpec& state);

/// Basis tokens: vortex:L, dipole, mixedlg.
ModeBasis parse_basis(std::string_view token);

}  // namespace bosonsim
