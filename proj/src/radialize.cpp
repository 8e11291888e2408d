// SPDX-License-Identifier: Apache-2.0
#include "kronred/radialize.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "kronred/errors.hpp"
#include "kronred/grid_model.hpp"

namespace kronred {

bool is_tree(const Adjacency& adj) {
  if (adj.n == 0) return true;
  if (adj.edge_count() != adj.n - 1) return false;
  std::vector<char> vis(size_t(adj.n), 0);
  std::queue<int> q;
  q.push(0);
  vis[0] = 1;
  int reached = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    ++reached;
    for (int v : adj.neighbors(u))
      if (!vis[size_t(v)]) {
        vis[size_t(v)] = 1;
        q.push(v);
      }
  }
  return reached == adj.n;
}

std::vector<Clique> find_maximal_cliques(const Adjacency& adj) {
  const int n = adj.n;
  std::vector<std::vector<int>> nbr(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) nbr[size_t(i)] = adj.neighbors(i);

  // maximal cliques of a Kron-of-tree graph are edge-disjoint, so the clique
  // of edge (u,v) is exactly {u,v} plus their common neighborhood
  std::vector<char> covered(size_t(n) * size_t(n), 0);
  auto cover = [&](int a, int b) { covered[size_t(a) * size_t(n) + size_t(b)] = 1; };
  auto is_covered = [&](int a, int b) {
    return covered[size_t(a) * size_t(n) + size_t(b)] != 0;
  };

  std::vector<Clique> cliques;
  for (int u = 0; u < n; ++u) {
    for (int v : nbr[size_t(u)]) {
      if (v <= u || is_covered(u, v)) continue;
      std::vector<int> members;
      std::set_intersection(nbr[size_t(u)].begin(), nbr[size_t(u)].end(),
                            nbr[size_t(v)].begin(), nbr[size_t(v)].end(),
                            std::back_inserter(members));
      members.push_back(u);
      members.push_back(v);
      std::sort(members.begin(), members.end());

      for (size_t a = 0; a < members.size(); ++a) {
        for (size_t b = a + 1; b < members.size(); ++b) {
          if (!adj.at(members[a], members[b]))
            throw StructuralError(
                "adjacency is not an edge-disjoint union of maximal cliques (nodes " +
                std::to_string(members[a]) + "," + std::to_string(members[b]) +
                " not adjacent); input is not a Kron reduction of a tree");
          if (is_covered(members[a], members[b]))
            throw StructuralError(
                "maximal cliques share an edge; input is not a Kron reduction of a tree");
          cover(members[a], members[b]);
          cover(members[b], members[a]);
        }
      }
      if (members.size() >= 3) cliques.push_back({std::move(members)});
    }
  }
  return cliques;
}

std::vector<int> critical_nodes(const std::vector<int>& member_ids, const Network& original) {
  if (member_ids.size() < 2) return {};
  const int n = original.size();
  for (int m : member_ids)
    if (m < 0 || m >= n)
      throw StructuralError("clique member " + std::to_string(m) + " not in the original network");

  const auto adj = original.neighbor_lists();
  const int root = member_ids.front();
  std::vector<int> parent(size_t(n), -2);
  std::queue<int> q;
  q.push(root);
  parent[size_t(root)] = -1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[size_t(u)])
      if (parent[size_t(v)] == -2) {
        parent[size_t(v)] = u;
        q.push(v);
      }
  }

  // minimal spanning subtree: union of the tree paths member -> root
  std::vector<char> marked(size_t(n), 0);
  marked[size_t(root)] = 1;
  for (int m : member_ids) {
    if (parent[size_t(m)] == -2)
      throw StructuralError("clique members are not connected in the original network");
    for (int u = m; u != root && !marked[size_t(u)]; u = parent[size_t(u)]) marked[size_t(u)] = 1;
  }

  std::vector<int> critical;
  for (int u = 0; u < n; ++u) {
    if (!marked[size_t(u)]) continue;
    int deg = 0;
    for (int v : adj[size_t(u)]) deg += marked[size_t(v)] ? 1 : 0;
    if (deg >= 3) critical.push_back(u);
  }
  return critical;
}

ReducedModel radialize(const ReducedModel& model, const Network& original,
                       const BlockMatrix& y, const ScenarioLibrary* lib) {
  const auto masks = phase_masks(original);
  const int slack = original.slack_id();

  std::set<int> kept(model.kept_ids.begin(), model.kept_ids.end());
  std::set<int> reinserted(model.reinserted.begin(), model.reinserted.end());

  ReducedModel out = model;
  for (int pass = 0; pass < original.size(); ++pass) {
    const Adjacency topo = block_topology(out.y_kron, 1e-9);
    const std::vector<Clique> cliques = find_maximal_cliques(topo);
    if (cliques.empty()) break;

    bool grew = false;
    for (const Clique& cq : cliques) {
      std::vector<int> members;
      members.reserve(cq.members.size());
      for (int c : cq.members) members.push_back(out.kept_ids[size_t(c)]);
      for (int cr : critical_nodes(members, original)) {
        if (kept.insert(cr).second) {
          reinserted.insert(cr);
          grew = true;
        }
      }
    }
    if (!grew)
      throw StructuralError("radialization stalled: cliques remain but no critical node found");

    Partition part;
    part.keep.assign(kept.begin(), kept.end());
    for (int i = 0; i < original.size(); ++i)
      if (!kept.contains(i)) part.reduce.push_back(i);
    check_partition(part, original.size(), slack);
    KronResult kr = kron_reduce(y, masks, part);
    out.kept_ids = std::move(kr.kept_ids);
    out.kept_phases = std::move(kr.kept_phases);
    out.y_kron = std::move(kr.y_kron);
  }

  if (!is_tree(block_topology(out.y_kron, 1e-9)))
    throw StructuralError("radialization did not produce a tree");

  out.radial = true;
  out.reinserted.assign(reinserted.begin(), reinserted.end());
  if (lib != nullptr)
    out.final_max_err = model_max_errors(out, original, *lib);
  else if (!out.reinserted.empty())
    out.final_max_err.clear();  // stale without scenarios to recompute against
  return out;
}

}  // namespace kronred
