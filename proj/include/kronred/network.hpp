// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kronred/complex3.hpp"
#include "kronred/phase.hpp"

namespace kronred {

struct Node {
  int id = -1;
  PhaseMask phases;
  bool is_slack = false;
  Vec3c slack_voltage;  // meaningful only when is_slack
};

/// Series branch between two nodes. `y_series` couples only phases present at
/// both endpoints; rows/cols of other phases must be exactly zero. Optional
/// shunt admittance blocks attach at each end.
struct Branch {
  int from = -1;
  int to = -1;
  Mat3c y_series;
  Mat3c shunt_from;
  Mat3c shunt_to;
};

/// Immutable three-phase radial feeder graph. Safe to share read-only across
/// parallel workers once constructed.
struct Network {
  std::vector<Node> nodes;
  std::vector<Branch> branches;

  int size() const { return int(nodes.size()); }

  /// Index of the unique slack node, or -1 if absent/ambiguous.
  int slack_id() const {
    int found = -1;
    for (const Node& nd : nodes) {
      if (nd.is_slack) {
        if (found >= 0) return -1;
        found = nd.id;
      }
    }
    return found;
  }

  std::vector<std::vector<int>> neighbor_lists() const;
};

struct Violation {
  std::string code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Report-only check of every Network/Branch invariant: dense ids, non-empty
/// phase masks, unique slack carrying all phases, radial connected topology,
/// branch phase confinement, phase monotonicity away from the slack, and
/// electrically connected present phases.
ValidationReport validate(const Network& net);

/// Throwing variant used at pipeline entry points.
void validate_or_throw(const Network& net);

/// Nominal flat three-phase slack voltage: 1 p.u., 120 degree spaced.
Vec3c nominal_slack_voltage();

}  // namespace kronred
