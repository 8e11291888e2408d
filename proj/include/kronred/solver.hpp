// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kronred/block_matrix.hpp"
#include "kronred/network.hpp"

namespace kronred {

/// Gaussian elimination of a subset of nodes from a block admittance matrix,
/// at 3x3-block granularity. Diagonal blocks of nodes with missing phases are
/// handled by inverting only the present-phase submatrix (structural
/// pseudo-inverse), so absent rows/cols never pollute the factors.
///
/// Two uses share this machinery:
///  - eliminating every non-slack node yields a reusable factorization for
///    anchored solves (forward/backward substitution per right-hand side);
///  - eliminating a reduce-set and harvesting the remaining blocks yields the
///    Schur complement, i.e. the Kron-reduced admittance over the kept nodes.
///
/// Elimination order is greedy minimum-degree over the requested set with
/// lowest-id tie-breaking, which keeps radial systems fill-free.
struct EliminationOptions {
  double pivot_rel_tol = 1e-12;  // relative to the largest input block entry
};

class BlockElimination {
 public:
  using Options = EliminationOptions;

  BlockElimination() = default;

  /// Factorize by eliminating `elim_set` from Y. Throws SolverError when a
  /// present-phase diagonal submatrix turns out singular.
  static BlockElimination eliminate(const BlockMatrix& y,
                                    const std::vector<PhaseMask>& phases,
                                    std::vector<int> elim_set, Options opt = {});

  /// Solve Y x = b on the eliminated rows, given boundary values: entries of
  /// `x` at kept (non-eliminated) nodes must be pre-set, entries at eliminated
  /// nodes are computed. `b` and `x` are full 3n scalar vectors; absent-phase
  /// entries come out exactly zero. Thread-safe for concurrent calls.
  void solve_interior(std::span<const cx> b, std::span<cx> x) const;

  /// Remaining (Schur complement) blocks over kept nodes, re-indexed densely
  /// in ascending original-id order. `kept_ids` receives the original ids.
  BlockMatrix schur_complement(std::vector<int>& kept_ids) const;

  const std::vector<int>& eliminated() const { return order_; }
  double smallest_pivot() const { return smallest_pivot_; }

 private:
  struct Coupling {
    int node;        // active neighbor at elimination time
    Mat3c from_elim; // block (neighbor <- eliminated): A[node][k]
    Mat3c to_elim;   // block (eliminated <- neighbor): A[k][node]
  };
  struct Step {
    int node;
    Mat3c diag_pinv;
    std::vector<Coupling> couplings;
  };

  int n_ = 0;
  std::vector<Step> steps_;
  std::vector<int> order_;
  std::vector<char> is_eliminated_;
  std::vector<PhaseMask> phases_;
  // remaining matrix after elimination, rows of kept nodes only
  std::vector<std::map<int, Mat3c>> remaining_;
  double smallest_pivot_ = 0.0;
};

/// Factorize-once / solve-many wrapper for the slack-anchored linear problem
/// Y V = I with the slack node pinned to its fixed voltage and absent-phase
/// entries identically zero. Immutable after construction; `solve` may be
/// called concurrently.
class AnchoredSolver {
 public:
  AnchoredSolver(const BlockMatrix& y, std::vector<PhaseMask> phases, int slack,
                 Vec3c slack_voltage);

  /// V such that (Y V)_row = inj_row on every non-slack present-phase row.
  std::vector<cx> solve(std::span<const cx> injections) const;

  /// Solution for zero injections (the affine offset of `solve`).
  const std::vector<cx>& zero_injection_solution() const { return v_zero_; }

  int n() const { return n_; }
  int slack() const { return slack_; }
  const Vec3c& slack_voltage() const { return slack_voltage_; }
  const std::vector<PhaseMask>& phases() const { return phases_; }

 private:
  int n_ = 0;
  int slack_ = -1;
  Vec3c slack_voltage_;
  std::vector<PhaseMask> phases_;
  BlockElimination elim_;
  std::vector<cx> v_zero_;
};

/// Max-magnitude residual of Y V = I over non-slack present-phase rows.
double anchored_residual(const BlockMatrix& y, const std::vector<PhaseMask>& phases,
                         int slack, std::span<const cx> v, std::span<const cx> inj);

}  // namespace kronred
