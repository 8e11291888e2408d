// SPDX-License-Identifier: Apache-2.0
#include "kronred/grid_model.hpp"

#include <algorithm>
#include <set>

#include "kronred/errors.hpp"

namespace kronred {

std::vector<PhaseMask> phase_masks(const Network& net) {
  std::vector<PhaseMask> m(net.nodes.size());
  for (const Node& nd : net.nodes) m[size_t(nd.id)] = nd.phases;
  return m;
}

BlockAdmittance assemble_admittance(const Network& net) {
  const int n = net.size();
  BlockAdmittance y(n);

  std::set<std::pair<int, int>> seen;
  for (const Branch& b : net.branches) {
    auto key = std::minmax(b.from, b.to);
    if (!seen.insert(key).second)
      throw StructuralError("duplicate branch (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ")");
    y.block(b.from, b.to) -= b.y_series;
    y.block(b.to, b.from) -= b.y_series.transpose();
    y.block(b.from, b.from) += b.y_series;
    y.block(b.to, b.to) += b.y_series.transpose();
    y.block(b.from, b.from) += b.shunt_from;
    y.block(b.to, b.to) += b.shunt_to;
  }

  // confine blocks to present phases (structural zeros for missing phases)
  for (int i = 0; i < n; ++i) {
    const PhaseMask mi = net.nodes[size_t(i)].phases;
    for (int j = 0; j < n; ++j) {
      const Mat3c* blk = y.find(i, j);
      if (blk == nullptr) continue;
      const PhaseMask mj = net.nodes[size_t(j)].phases;
      Mat3c masked;
      for (int r = 0; r < 3; ++r) {
        if (!mi.has(r)) continue;
        for (int c = 0; c < 3; ++c)
          if (mj.has(c)) masked(r, c) = (*blk)(r, c);
      }
      y.block(i, j) = masked;
    }
  }

  // a present phase with an all-zero row cannot be solved for (slack rows are
  // pinned, so an unused slack phase is fine)
  for (int i = 0; i < n; ++i) {
    if (net.nodes[size_t(i)].is_slack) continue;
    const PhaseMask mi = net.nodes[size_t(i)].phases;
    for (int p = 0; p < 3; ++p) {
      if (!mi.has(p)) continue;
      bool nonzero = false;
      for (const auto& [j, blk] : y.row(i)) {
        (void)j;
        for (int c = 0; c < 3 && !nonzero; ++c)
          if (blk(p, c) != cx{}) nonzero = true;
        if (nonzero) break;
      }
      if (!nonzero)
        throw StructuralError("phase " + std::string(1, char('a' + p)) + " of node " +
                              std::to_string(i) + " has an all-zero admittance row");
    }
  }

  y.prune_zero_blocks();
  return y;
}

Adjacency adjacency(const Network& net) {
  Adjacency adj(net.size());
  for (const Branch& b : net.branches) adj.set(b.from, b.to);
  return adj;
}

}  // namespace kronred
