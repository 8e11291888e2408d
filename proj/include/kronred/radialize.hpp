// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "kronred/reduce.hpp"

namespace kronred {

/// Mutually adjacent vertex set of size >= 3 (compact indices of the
/// adjacency it was found in).
struct Clique {
  std::vector<int> members;
};

/// All maximal cliques of size >= 3 of an adjacency that arose from Kron
/// reduction of a tree. Such graphs decompose into edge-disjoint maximal
/// cliques, which the detector exploits: the maximal clique of edge (u,v) is
/// {u,v} plus their common neighborhood. Throws StructuralError when the
/// input is not decomposable this way.
std::vector<Clique> find_maximal_cliques(const Adjacency& adj);

/// Nodes of degree >= 3 within the minimal subtree of the original feeder
/// spanning `member_ids` (union of pairwise tree paths). These are the nodes
/// whose elimination meshed the clique.
std::vector<int> critical_nodes(const std::vector<int>& member_ids, const Network& original);

/// Tree check helper: connected with exactly |V|-1 edges.
bool is_tree(const Adjacency& adj);

/// Re-insert every clique's critical nodes into the kept set and re-run the
/// Kron reduction, leaving the reinserted nodes as zero-injection singleton
/// clusters (their original injections stay with their former super-nodes).
/// The result is radial and electrically equivalent at the super-nodes.
///
/// When `lib` is given the per-scenario error report is recomputed on the
/// radialized model.
ReducedModel radialize(const ReducedModel& model, const Network& original,
                       const BlockMatrix& y, const ScenarioLibrary* lib = nullptr);

}  // namespace kronred
