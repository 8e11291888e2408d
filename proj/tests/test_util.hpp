// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and independent oracles for the test suites. The dense
// complex LU here is deliberately separate from the library's block solver:
// it is the reference the block machinery is checked against.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "kronred/block_matrix.hpp"
#include "kronred/grid_model.hpp"
#include "kronred/kron.hpp"
#include "kronred/network.hpp"

namespace kronred::testing {

// --- dense complex linear algebra oracle -------------------------------------

struct DenseC {
  int n = 0;
  std::vector<cx> a;  // row-major

  explicit DenseC(int n_in) : n(n_in), a(size_t(n_in) * size_t(n_in), cx{}) {}
  cx& at(int i, int j) { return a[size_t(i) * size_t(n) + size_t(j)]; }
  const cx& at(int i, int j) const { return a[size_t(i) * size_t(n) + size_t(j)]; }

  static DenseC from_blocks(const BlockMatrix& y) {
    DenseC d(3 * y.n());
    for (int i = 0; i < y.n(); ++i)
      for (const auto& [j, blk] : y.row(i))
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) d.at(3 * i + r, 3 * j + c) = blk(r, c);
    return d;
  }

  // LU with partial pivoting; solves in place copies
  std::vector<cx> solve(std::vector<cx> b) const {
    DenseC lu = *this;
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[size_t(i)] = i;
    for (int col = 0; col < n; ++col) {
      int piv = col;
      double best = std::abs(lu.at(col, col));
      for (int r = col + 1; r < n; ++r)
        if (std::abs(lu.at(r, col)) > best) {
          best = std::abs(lu.at(r, col));
          piv = r;
        }
      if (best < 1e-14) throw std::runtime_error("dense oracle: singular matrix");
      if (piv != col) {
        for (int c = 0; c < n; ++c) std::swap(lu.at(piv, c), lu.at(col, c));
        std::swap(b[size_t(piv)], b[size_t(col)]);
      }
      for (int r = col + 1; r < n; ++r) {
        const cx f = lu.at(r, col) / lu.at(col, col);
        if (f == cx{}) continue;
        lu.at(r, col) = f;
        for (int c = col + 1; c < n; ++c) lu.at(r, c) -= f * lu.at(col, c);
        b[size_t(r)] -= f * b[size_t(col)];
      }
    }
    for (int r = n - 1; r >= 0; --r) {
      cx acc = b[size_t(r)];
      for (int c = r + 1; c < n; ++c) acc -= lu.at(r, c) * b[size_t(c)];
      b[size_t(r)] = acc / lu.at(r, r);
    }
    return b;
  }
};

// Anchored solve oracle: pin slack and absent-phase scalar rows to identity.
inline std::vector<cx> dense_anchored_solve(const BlockMatrix& y,
                                            const std::vector<PhaseMask>& phases, int slack,
                                            const Vec3c& slack_v, std::vector<cx> inj) {
  DenseC d = DenseC::from_blocks(y);
  const int dim = d.n;
  for (int i = 0; i < y.n(); ++i) {
    for (int p = 0; p < 3; ++p) {
      const int row = 3 * i + p;
      const bool pinned = (i == slack) || !phases[size_t(i)].has(p);
      if (!pinned) continue;
      for (int c = 0; c < dim; ++c) d.at(row, c) = cx{};
      d.at(row, row) = 1.0;
      inj[size_t(row)] = (i == slack && phases[size_t(i)].has(p)) ? slack_v[p] : cx{};
    }
  }
  return d.solve(std::move(inj));
}

// Batch-route Kron oracle: Schur complement on present-phase scalar indices,
// zero-padded back to 3|K| block shape (kept ids ascending).
inline DenseC dense_kron(const BlockMatrix& y, const std::vector<PhaseMask>& phases,
                         const Partition& part) {
  DenseC d = DenseC::from_blocks(y);
  std::vector<int> kept = part.keep;
  std::sort(kept.begin(), kept.end());
  std::vector<int> kidx;  // all 3 scalar slots per kept node (block shape)
  for (int id : kept)
    for (int p = 0; p < 3; ++p) kidx.push_back(3 * id + p);
  std::vector<int> ridx;  // present-phase slots of reduced nodes only
  for (int id : part.reduce)
    for (int p = 0; p < 3; ++p)
      if (phases[size_t(id)].has(p)) ridx.push_back(3 * id + p);

  const int nk = int(kidx.size());
  const int nr = int(ridx.size());
  DenseC out(nk);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < nk; ++j) out.at(i, j) = d.at(kidx[size_t(i)], kidx[size_t(j)]);
  if (nr == 0) return out;

  // X = D^-1 C, column by column
  DenseC rr(nr);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) rr.at(i, j) = d.at(ridx[size_t(i)], ridx[size_t(j)]);
  for (int j = 0; j < nk; ++j) {
    std::vector<cx> col(static_cast<size_t>(nr));
    for (int i = 0; i < nr; ++i) col[size_t(i)] = d.at(ridx[size_t(i)], kidx[size_t(j)]);
    const std::vector<cx> x = rr.solve(std::move(col));
    for (int i = 0; i < nk; ++i) {
      cx acc{};
      for (int r = 0; r < nr; ++r) acc += d.at(kidx[size_t(i)], ridx[size_t(r)]) * x[size_t(r)];
      out.at(i, j) -= acc;
    }
  }
  return out;
}

// Scalar unit-weight Laplacian Kron topology (the single-phase side of the
// topology-equality property).
inline Adjacency laplacian_kron_topology(const Network& net, const std::vector<int>& reduce) {
  const int n = net.size();
  DenseC lap(n);
  for (const Branch& b : net.branches) {
    lap.at(b.from, b.from) += 1.0;
    lap.at(b.to, b.to) += 1.0;
    lap.at(b.from, b.to) -= 1.0;
    lap.at(b.to, b.from) -= 1.0;
  }
  std::vector<char> in_r(size_t(n), 0);
  for (int r : reduce) in_r[size_t(r)] = 1;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (!in_r[size_t(i)]) keep.push_back(i);

  const int nk = int(keep.size());
  const int nr = int(reduce.size());
  DenseC out(nk);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < nk; ++j) out.at(i, j) = lap.at(keep[size_t(i)], keep[size_t(j)]);
  if (nr > 0) {
    DenseC rr(nr);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nr; ++j) rr.at(i, j) = lap.at(reduce[size_t(i)], reduce[size_t(j)]);
    for (int j = 0; j < nk; ++j) {
      std::vector<cx> col(static_cast<size_t>(nr));
      for (int i = 0; i < nr; ++i) col[size_t(i)] = lap.at(reduce[size_t(i)], keep[size_t(j)]);
      const std::vector<cx> x = rr.solve(std::move(col));
      for (int i = 0; i < nk; ++i) {
        cx acc{};
        for (int r = 0; r < nr; ++r)
          acc += lap.at(keep[size_t(i)], reduce[size_t(r)]) * x[size_t(r)];
        out.at(i, j) -= acc;
      }
    }
  }
  double scale = 0;
  for (const cx& v : out.a) scale = std::max(scale, std::abs(v));
  Adjacency adj(nk);
  for (int i = 0; i < nk; ++i)
    for (int j = i + 1; j < nk; ++j)
      if (std::abs(out.at(i, j)) > 1e-9 * scale) adj.set(i, j);
  return adj;
}

// --- brute-force maximal cliques (Bron–Kerbosch, no pivoting) -----------------

inline void bk_recurse(const Adjacency& adj, std::vector<int>& R, std::vector<int> P,
                       std::vector<int> X, std::vector<std::vector<int>>& out) {
  if (P.empty() && X.empty()) {
    if (R.size() >= 3) out.push_back(R);
    return;
  }
  while (!P.empty()) {
    const int v = P.back();
    P.pop_back();
    std::vector<int> pn, xn;
    for (int u : P)
      if (adj.at(u, v)) pn.push_back(u);
    for (int u : X)
      if (adj.at(u, v)) xn.push_back(u);
    R.push_back(v);
    bk_recurse(adj, R, pn, xn, out);
    R.pop_back();
    X.push_back(v);
  }
}

inline std::vector<std::vector<int>> brute_force_cliques(const Adjacency& adj) {
  std::vector<int> R, P, X;
  for (int i = adj.n - 1; i >= 0; --i) P.push_back(i);
  std::vector<std::vector<int>> out;
  bk_recurse(adj, R, P, X, out);
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

// --- fixtures -----------------------------------------------------------------

inline Branch unit_branch(int from, int to) {
  Branch b;
  b.from = from;
  b.to = to;
  b.y_series = Mat3c::identity();
  return b;
}

inline Node plain_node(int id, PhaseMask m = PhaseMask::abc()) {
  Node nd;
  nd.id = id;
  nd.phases = m;
  return nd;
}

inline Node slack_node(int id) {
  Node nd = plain_node(id);
  nd.is_slack = true;
  nd.slack_voltage = nominal_slack_voltage();
  return nd;
}

/// slack(0) - 1 - 2 - ... - (n-1), identity series blocks
inline Network unit_chain(int n) {
  Network net;
  net.nodes.push_back(slack_node(0));
  for (int i = 1; i < n; ++i) {
    net.nodes.push_back(plain_node(i));
    net.branches.push_back(unit_branch(i - 1, i));
  }
  return net;
}

/// 4-node star: center 2 connected to 0 (slack), 1, 3
inline Network unit_star4() {
  Network net;
  net.nodes.push_back(slack_node(0));
  net.nodes.push_back(plain_node(1));
  net.nodes.push_back(plain_node(2));
  net.nodes.push_back(plain_node(3));
  net.branches.push_back(unit_branch(0, 2));
  net.branches.push_back(unit_branch(2, 1));
  net.branches.push_back(unit_branch(2, 3));
  return net;
}

/// flat-voltage slack for single-phase-equivalent examples: all phases at 1+0j
inline Network scalar_two_node(double y_pu = 1.0) {
  Network net;
  Node s = plain_node(0);
  s.is_slack = true;
  s.slack_voltage[0] = s.slack_voltage[1] = s.slack_voltage[2] = cx{1.0, 0.0};
  net.nodes.push_back(s);
  net.nodes.push_back(plain_node(1));
  Branch b = unit_branch(0, 1);
  for (int k = 0; k < 9; ++k) b.y_series.m[size_t(k)] = cx{};
  b.y_series(0, 0) = b.y_series(1, 1) = b.y_series(2, 2) = y_pu;
  net.branches.push_back(b);
  return net;
}

inline double max_block_diff(const BlockMatrix& a, const DenseC& b) {
  double m = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) {
      const Mat3c* blk = a.find(i, j);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          const cx va = blk != nullptr ? (*blk)(r, c) : cx{};
          m = std::max(m, std::abs(va - b.at(3 * i + r, 3 * j + c)));
        }
    }
  return m;
}

inline double max_cvec_diff(std::span<const cx> a, std::span<const cx> b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace kronred::testing
