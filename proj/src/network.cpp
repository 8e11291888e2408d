// SPDX-License-Identifier: Apache-2.0
#include "kronred/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

namespace kronred {

std::vector<std::vector<int>> Network::neighbor_lists() const {
  std::vector<std::vector<int>> adj(nodes.size());
  for (const Branch& b : branches) {
    if (b.from >= 0 && b.from < size() && b.to >= 0 && b.to < size()) {
      adj[size_t(b.from)].push_back(b.to);
      adj[size_t(b.to)].push_back(b.from);
    }
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());
  return adj;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const Violation& v : violations) os << v.code << ": " << v.detail << "\n";
  return os.str();
}

Vec3c nominal_slack_voltage() {
  const double th = 2.0 * std::numbers::pi / 3.0;
  Vec3c v;
  v[0] = cx{1.0, 0.0};
  v[1] = cx{std::cos(-th), std::sin(-th)};
  v[2] = cx{std::cos(th), std::sin(th)};
  return v;
}

namespace {

void add(ValidationReport& rep, std::string code, std::string detail) {
  rep.violations.push_back({std::move(code), std::move(detail)});
}

std::string pair_str(int a, int b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

}  // namespace

ValidationReport validate(const Network& net) {
  ValidationReport rep;
  const int n = net.size();
  if (n == 0) {
    add(rep, "empty", "network has no nodes");
    return rep;
  }

  for (int i = 0; i < n; ++i) {
    const Node& nd = net.nodes[size_t(i)];
    if (nd.id != i)
      add(rep, "node-id", "node at position " + std::to_string(i) + " has id " +
                              std::to_string(nd.id) + " (ids must be dense 0..n-1)");
    if (nd.phases.empty())
      add(rep, "empty-phase-mask", "node " + std::to_string(i) + " carries no phases");
  }

  int slack_count = 0;
  int slack = -1;
  for (const Node& nd : net.nodes) {
    if (nd.is_slack) {
      ++slack_count;
      slack = nd.id;
    }
  }
  if (slack_count != 1)
    add(rep, "slack-count", std::to_string(slack_count) + " slack nodes (need exactly 1)");
  if (slack_count == 1 && net.nodes[size_t(slack)].phases != PhaseMask::abc())
    add(rep, "slack-phases", "slack node " + std::to_string(slack) + " must carry all three phases");

  // branch-level checks
  std::set<std::pair<int, int>> seen;
  for (size_t bi = 0; bi < net.branches.size(); ++bi) {
    const Branch& b = net.branches[bi];
    if (b.from < 0 || b.from >= n || b.to < 0 || b.to >= n) {
      add(rep, "branch-endpoint", "branch #" + std::to_string(bi) + " references unknown node");
      continue;
    }
    if (b.from == b.to) {
      add(rep, "self-loop", "branch #" + std::to_string(bi) + " connects node " +
                                std::to_string(b.from) + " to itself");
      continue;
    }
    auto key = std::minmax(b.from, b.to);
    if (!seen.insert(key).second)
      add(rep, "duplicate-branch", "pair " + pair_str(key.first, key.second) + " appears twice");

    const PhaseMask common =
        net.nodes[size_t(b.from)].phases.intersect(net.nodes[size_t(b.to)].phases);
    if (!b.y_series.confined_to(common))
      add(rep, "branch-phase-leak",
          "branch " + pair_str(b.from, b.to) + " couples phases absent at an endpoint");
    if (!b.shunt_from.confined_to(net.nodes[size_t(b.from)].phases))
      add(rep, "shunt-phase-leak", "shunt at node " + std::to_string(b.from) +
                                       " of branch " + pair_str(b.from, b.to) +
                                       " touches absent phases");
    if (!b.shunt_to.confined_to(net.nodes[size_t(b.to)].phases))
      add(rep, "shunt-phase-leak", "shunt at node " + std::to_string(b.to) + " of branch " +
                                       pair_str(b.from, b.to) + " touches absent phases");
  }

  // radiality: |E| = n-1 and connected
  if (int(net.branches.size()) != n - 1)
    add(rep, "not-radial", std::to_string(net.branches.size()) + " branches for " +
                               std::to_string(n) + " nodes (radial needs n-1)");

  const auto adj = net.neighbor_lists();
  {
    std::vector<char> vis(size_t(n), 0);
    std::queue<int> q;
    const int root = slack_count == 1 ? slack : 0;
    q.push(root);
    vis[size_t(root)] = 1;
    int reached = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      ++reached;
      for (int v : adj[size_t(u)])
        if (!vis[size_t(v)]) {
          vis[size_t(v)] = 1;
          q.push(v);
        }
    }
    if (reached != n)
      add(rep, "disconnected",
          std::to_string(n - reached) + " nodes unreachable from node " + std::to_string(root));

    // phase monotonicity and connected phases, along the tree away from the slack
    if (slack_count == 1 && reached == n && int(net.branches.size()) == n - 1) {
      std::vector<int> parent(size_t(n), -1);
      std::vector<char> seen2(size_t(n), 0);
      std::queue<int> q2;
      q2.push(slack);
      seen2[size_t(slack)] = 1;
      std::vector<const Branch*> branch_of(size_t(n), nullptr);  // branch to parent
      std::map<std::pair<int, int>, const Branch*> bmap;
      for (const Branch& b : net.branches)
        bmap[std::minmax(b.from, b.to)] = &b;
      while (!q2.empty()) {
        int u = q2.front();
        q2.pop();
        for (int v : adj[size_t(u)]) {
          if (seen2[size_t(v)]) continue;
          seen2[size_t(v)] = 1;
          parent[size_t(v)] = u;
          branch_of[size_t(v)] = bmap[std::minmax(u, v)];
          q2.push(v);
        }
      }
      for (int v = 0; v < n; ++v) {
        if (v == slack || parent[size_t(v)] < 0) continue;
        const PhaseMask child = net.nodes[size_t(v)].phases;
        const PhaseMask par = net.nodes[size_t(parent[size_t(v)])].phases;
        if (!child.subset_of(par))
          add(rep, "phase-monotonicity",
              "node " + std::to_string(v) + " (" + child.str() + ") widens phases of parent " +
                  std::to_string(parent[size_t(v)]) + " (" + par.str() + ")");
        // every phase of v must be electrically tied to the parent
        const Branch* b = branch_of[size_t(v)];
        if (b != nullptr) {
          for (int p = 0; p < 3; ++p) {
            if (!child.has(p)) continue;
            bool coupled = false;
            for (int c = 0; c < 3 && !coupled; ++c)
              if (b->y_series(p, c) != cx{}) coupled = true;
            if (!coupled)
              add(rep, "disconnected-phase", "phase " + std::string(1, char('a' + p)) +
                                                 " of node " + std::to_string(v) +
                                                 " has no coupling toward the slack");
          }
        }
      }
    }
  }

  return rep;
}

void validate_or_throw(const Network& net) {
  ValidationReport rep = validate(net);
  if (!rep.ok()) throw ValidationError("invalid network:\n" + rep.to_string());
}

}  // namespace kronred
