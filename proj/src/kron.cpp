// SPDX-License-Identifier: Apache-2.0
#include "kronred/kron.hpp"

#include <algorithm>

#include "kronred/errors.hpp"
#include "kronred/solver.hpp"

namespace kronred {

int KronResult::pos(int original_id) const {
  auto it = std::lower_bound(kept_ids.begin(), kept_ids.end(), original_id);
  if (it == kept_ids.end() || *it != original_id) return -1;
  return int(it - kept_ids.begin());
}

void check_partition(const Partition& part, int n, int slack) {
  std::vector<char> seen(size_t(n), 0);
  auto mark = [&](int id, const char* which) {
    if (id < 0 || id >= n)
      throw ValidationError(std::string("partition: unknown node in ") + which + " set");
    if (seen[size_t(id)]) throw ValidationError("partition: node " + std::to_string(id) +
                                                " appears twice");
    seen[size_t(id)] = 1;
  };
  for (int id : part.keep) mark(id, "keep");
  for (int id : part.reduce) mark(id, "reduce");
  if (int(part.keep.size() + part.reduce.size()) != n)
    throw ValidationError("partition: keep and reduce must cover all nodes");
  if (slack >= 0 && std::find(part.keep.begin(), part.keep.end(), slack) == part.keep.end())
    throw ValidationError("partition: the slack node must be kept");
}

KronResult kron_reduce(const BlockMatrix& y, const std::vector<PhaseMask>& phases,
                       const Partition& part) {
  KronResult kr;
  BlockElimination elim = BlockElimination::eliminate(y, phases, part.reduce);
  kr.y_kron = elim.schur_complement(kr.kept_ids);
  std::vector<int> keep_sorted = part.keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  if (keep_sorted != kr.kept_ids)
    throw ValidationError("partition: keep set does not cover the non-reduced nodes");
  kr.kept_phases.reserve(kr.kept_ids.size());
  for (int id : kr.kept_ids) kr.kept_phases.push_back(phases[size_t(id)]);
  return kr;
}

std::vector<cx> solve_kept(const KronResult& kr, std::span<const cx> i_kept,
                           int slack_original_id, const Vec3c& slack_voltage) {
  const int sp = kr.pos(slack_original_id);
  if (sp < 0) throw ValidationError("solve_kept: slack is not among the kept nodes");
  const AnchoredSolver solver(kr.y_kron, kr.kept_phases, sp, slack_voltage);
  return solver.solve(i_kept);
}

Adjacency block_topology(const BlockMatrix& y, double tol) {
  const int nk = y.n();
  Adjacency adj(nk);
  const double threshold = tol * y.max_abs();
  for (int i = 0; i < nk; ++i) {
    for (const auto& [j, blk] : y.row(i)) {
      if (j <= i) continue;
      if (blk.max_abs() > threshold) adj.set(i, j);
    }
  }
  return adj;
}

Adjacency reduced_topology(const KronResult& kr, double tol) {
  return block_topology(kr.y_kron, tol);
}

}  // namespace kronred
