// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "kronred/errors.hpp"

namespace kronred {

/// Subset of the three phases {a,b,c} present at a node, encoded as three bits.
struct PhaseMask {
  std::uint8_t bits = 0;  // bit 0 = a, bit 1 = b, bit 2 = c

  static constexpr PhaseMask abc() { return PhaseMask{0b111}; }
  static constexpr PhaseMask none() { return PhaseMask{0}; }

  static PhaseMask parse(std::string_view s) {
    PhaseMask m;
    for (char c : s) {
      switch (c) {
        case 'a': m.bits |= 1; break;
        case 'b': m.bits |= 2; break;
        case 'c': m.bits |= 4; break;
        default:
          throw ValidationError("invalid phase string '" + std::string(s) + "'");
      }
    }
    return m;
  }

  std::string str() const {
    std::string s;
    if (has(0)) s += 'a';
    if (has(1)) s += 'b';
    if (has(2)) s += 'c';
    return s;
  }

  constexpr bool has(int phase) const { return (bits >> phase) & 1; }
  constexpr bool empty() const { return bits == 0; }
  constexpr int count() const {
    return int((bits & 1) + ((bits >> 1) & 1) + ((bits >> 2) & 1));
  }
  constexpr bool subset_of(PhaseMask other) const { return (bits & ~other.bits) == 0; }
  constexpr PhaseMask intersect(PhaseMask other) const {
    return PhaseMask{static_cast<std::uint8_t>(bits & other.bits)};
  }

  friend constexpr bool operator==(PhaseMask a, PhaseMask b) = default;
};

}  // namespace kronred
