// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "kronred/block_matrix.hpp"
#include "kronred/network.hpp"

namespace kronred {

/// Disjoint split of the node set into kept and reduced nodes. The slack must
/// be kept; every node appears exactly once.
struct Partition {
  std::vector<int> keep;
  std::vector<int> reduce;
};

/// Kron-reduced admittance over the kept nodes, with the index bookkeeping
/// needed to move between original ids and compact positions.
struct KronResult {
  BlockMatrix y_kron;                 // |K| x |K| blocks, compact indices
  std::vector<int> kept_ids;          // ascending original ids; position = compact index
  std::vector<PhaseMask> kept_phases; // masks of kept nodes, compact order

  int pos(int original_id) const;     // -1 when not kept
};

/// Y_Kron = Y_KK - Y_KR * pinv(Y_RR) * Y_RK, the Schur complement onto the
/// kept set. The pseudo-inverse of Y_RR is realized structurally: nodes are
/// eliminated whole (all phases at once), each with its present-phase diagonal
/// submatrix inverted and zero-padded. Throws SolverError when the
/// present-phase system of the reduce set is singular.
KronResult kron_reduce(const BlockMatrix& y, const std::vector<PhaseMask>& phases,
                       const Partition& part);

void check_partition(const Partition& part, int n, int slack);

/// Anchored solve on the reduced system; i_kept is a 3|K| compact vector, the
/// result is a 3|K| compact voltage vector.
std::vector<cx> solve_kept(const KronResult& kr, std::span<const cx> i_kept,
                           int slack_original_id, const Vec3c& slack_voltage);

/// Boolean topology of the reduced network: nodes i,j are connected when the
/// off-diagonal block (i,j) holds any entry above tol * (largest entry
/// magnitude in Y_Kron).
Adjacency reduced_topology(const KronResult& kr, double tol = 1e-9);

/// Same rule applied directly to a block matrix.
Adjacency block_topology(const BlockMatrix& y, double tol = 1e-9);

}  // namespace kronred
