// SPDX-License-Identifier: Apache-2.0
#include "kronred/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "kronred/errors.hpp"

namespace kronred {

namespace {
std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
}  // namespace

BlockElimination BlockElimination::eliminate(const BlockMatrix& y,
                                             const std::vector<PhaseMask>& phases,
                                             std::vector<int> elim_set, Options opt) {
  const int n = y.n();
  BlockElimination e;
  e.n_ = n;
  e.phases_ = phases;
  e.is_eliminated_.assign(size_t(n), 0);
  e.steps_.reserve(elim_set.size());
  e.order_.reserve(elim_set.size());
  e.smallest_pivot_ = std::numeric_limits<double>::infinity();

  // working copy of the matrix, mutated by Schur updates
  std::vector<std::map<int, Mat3c>> work(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) work[size_t(i)] = y.row(i);

  std::vector<char> to_eliminate(size_t(n), 0);
  for (int k : elim_set) {
    if (k < 0 || k >= n) throw ValidationError("elimination set references unknown node");
    if (to_eliminate[size_t(k)]) throw ValidationError("elimination set repeats a node");
    to_eliminate[size_t(k)] = 1;
  }

  std::vector<int> degree(size_t(n), 0);
  for (int i = 0; i < n; ++i) {
    int d = 0;
    for (const auto& [j, b] : work[size_t(i)])
      if (j != i) ++d;
    degree[size_t(i)] = d;
  }

  const double scale = std::max(y.max_abs(), 1.0);
  const double pivot_floor = opt.pivot_rel_tol * scale;

  size_t remaining = elim_set.size();
  while (remaining > 0) {
    // greedy minimum degree, lowest id on ties
    int k = -1;
    int best = std::numeric_limits<int>::max();
    for (int i = 0; i < n; ++i) {
      if (!to_eliminate[size_t(i)] || e.is_eliminated_[size_t(i)]) continue;
      if (degree[size_t(i)] < best) {
        best = degree[size_t(i)];
        k = i;
      }
    }

    auto& row_k = work[size_t(k)];
    Mat3c diag;
    if (auto it = row_k.find(k); it != row_k.end()) diag = it->second;

    Step step;
    step.node = k;
    double pivot = 0;
    if (!masked_inverse(diag, phases[size_t(k)], step.diag_pinv, pivot, pivot_floor)) {
      throw SolverError("singular present-phase diagonal while eliminating node " +
                            std::to_string(k) + " (smallest pivot " + sci(pivot) + ", " +
                            std::to_string(remaining) + " of " +
                            std::to_string(elim_set.size()) + " eliminations left)",
                        pivot, k);
    }
    if (phases[size_t(k)].count() > 0) e.smallest_pivot_ = std::min(e.smallest_pivot_, pivot);

    step.couplings.reserve(row_k.size());
    for (const auto& [j, blk] : row_k) {
      if (j == k || e.is_eliminated_[size_t(j)]) continue;
      Coupling c;
      c.node = j;
      c.to_elim = blk;  // A[k][j]
      c.from_elim = work[size_t(j)][k];
      step.couplings.push_back(c);
    }

    // Schur update on all active neighbor pairs
    for (const Coupling& ci : step.couplings) {
      const Mat3c t = ci.from_elim * step.diag_pinv;  // A[i][k] * pinv
      auto& row_i = work[size_t(ci.node)];
      for (const Coupling& cj : step.couplings) {
        auto [it, inserted] = row_i.try_emplace(cj.node);
        it->second -= t * cj.to_elim;
        if (inserted && ci.node != cj.node) {
          ++degree[size_t(ci.node)];
        }
      }
      row_i.erase(k);
      --degree[size_t(ci.node)];
    }
    row_k.clear();

    e.is_eliminated_[size_t(k)] = 1;
    e.order_.push_back(k);
    e.steps_.push_back(std::move(step));
    --remaining;
  }

  e.remaining_ = std::move(work);
  return e;
}

void BlockElimination::solve_interior(std::span<const cx> b, std::span<cx> x) const {
  std::vector<cx> rhs(b.begin(), b.end());
  std::vector<Vec3c> t(static_cast<size_t>(n_));

  // forward: push eliminated contributions downstream
  for (const Step& s : steps_) {
    Vec3c bk;
    for (int p = 0; p < 3; ++p) bk[p] = rhs[size_t(3 * s.node + p)];
    const Vec3c tk = s.diag_pinv * bk;
    t[size_t(s.node)] = tk;
    for (const Coupling& c : s.couplings) {
      const Vec3c upd = c.from_elim * tk;
      for (int p = 0; p < 3; ++p) rhs[size_t(3 * c.node + p)] -= upd[p];
    }
  }

  // backward: resolve eliminated unknowns against boundary/later values
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    const Step& s = *it;
    Vec3c acc;
    for (const Coupling& c : s.couplings) {
      Vec3c xj;
      for (int p = 0; p < 3; ++p) xj[p] = x[size_t(3 * c.node + p)];
      acc += c.to_elim * xj;
    }
    const Vec3c corr = s.diag_pinv * acc;
    for (int p = 0; p < 3; ++p)
      x[size_t(3 * s.node + p)] = t[size_t(s.node)][p] - corr[p];
  }
}

BlockMatrix BlockElimination::schur_complement(std::vector<int>& kept_ids) const {
  kept_ids.clear();
  for (int i = 0; i < n_; ++i)
    if (!is_eliminated_[size_t(i)]) kept_ids.push_back(i);

  std::vector<int> pos(size_t(n_), -1);
  for (size_t p = 0; p < kept_ids.size(); ++p) pos[size_t(kept_ids[p])] = int(p);

  BlockMatrix s(int(kept_ids.size()));
  for (int i : kept_ids) {
    for (const auto& [j, blk] : remaining_[size_t(i)]) {
      if (blk.is_zero()) continue;
      s.block(pos[size_t(i)], pos[size_t(j)]) = blk;
    }
  }
  return s;
}

AnchoredSolver::AnchoredSolver(const BlockMatrix& y, std::vector<PhaseMask> phases, int slack,
                               Vec3c slack_voltage)
    : n_(y.n()), slack_(slack), slack_voltage_(slack_voltage), phases_(std::move(phases)) {
  if (slack_ < 0 || slack_ >= n_) throw ValidationError("anchored solve: slack id out of range");
  std::vector<int> elim;
  elim.reserve(size_t(n_) - 1);
  for (int i = 0; i < n_; ++i)
    if (i != slack_) elim.push_back(i);
  elim_ = BlockElimination::eliminate(y, phases_, std::move(elim));
  std::vector<cx> zero(size_t(3 * n_), cx{});
  v_zero_ = solve(zero);
}

std::vector<cx> AnchoredSolver::solve(std::span<const cx> injections) const {
  std::vector<cx> x(size_t(3 * n_), cx{});
  for (int p = 0; p < 3; ++p) x[size_t(3 * slack_ + p)] = slack_voltage_[p];
  elim_.solve_interior(injections, x);
  return x;
}

double anchored_residual(const BlockMatrix& y, const std::vector<PhaseMask>& phases,
                         int slack, std::span<const cx> v, std::span<const cx> inj) {
  std::vector<cx> yv(size_t(3 * y.n()));
  y.multiply(v, yv);
  double r = 0;
  for (int i = 0; i < y.n(); ++i) {
    if (i == slack) continue;
    for (int p = 0; p < 3; ++p) {
      if (!phases[size_t(i)].has(p)) continue;
      r = std::max(r, std::abs(yv[size_t(3 * i + p)] - inj[size_t(3 * i + p)]));
    }
  }
  return r;
}

}  // namespace kronred
