// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <vector>

#include "kronred/complex3.hpp"

namespace kronred {

/// Node-indexed sparse matrix of dense 3x3 complex blocks. Row/col index
/// (node, phase) maps to scalar index 3*node + phase. Missing phases are kept
/// as structural zero rows/cols inside the blocks.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(int n) : n_(n), rows_(size_t(n)) {}

  int n() const { return n_; }
  int scalar_dim() const { return 3 * n_; }

  /// Block (i,j), created zero on first access.
  Mat3c& block(int i, int j) { return rows_[size_t(i)][j]; }

  /// Block (i,j) or nullptr when structurally absent.
  const Mat3c* find(int i, int j) const {
    const auto& r = rows_[size_t(i)];
    auto it = r.find(j);
    return it == r.end() ? nullptr : &it->second;
  }

  void add(int i, int j, const Mat3c& b) { rows_[size_t(i)][j] += b; }

  const std::map<int, Mat3c>& row(int i) const { return rows_[size_t(i)]; }

  int block_count() const {
    int c = 0;
    for (const auto& r : rows_) c += int(r.size());
    return c;
  }

  /// Largest entry magnitude over all stored blocks.
  double max_abs() const {
    double m = 0;
    for (const auto& r : rows_)
      for (const auto& [j, b] : r) m = std::max(m, b.max_abs());
    return m;
  }

  /// y = A * x over full 3n scalar vectors.
  void multiply(std::span<const cx> x, std::span<cx> y) const;

  /// Drop blocks that are exactly zero.
  void prune_zero_blocks();

 private:
  int n_ = 0;
  std::vector<std::map<int, Mat3c>> rows_;
};

using BlockAdmittance = BlockMatrix;

/// Dense boolean symmetric adjacency with zero diagonal.
struct Adjacency {
  int n = 0;
  std::vector<std::uint8_t> a;  // n*n row-major

  Adjacency() = default;
  explicit Adjacency(int n_in) : n(n_in), a(size_t(n_in) * size_t(n_in), 0) {}

  bool at(int i, int j) const { return a[size_t(i) * size_t(n) + size_t(j)] != 0; }
  void set(int i, int j) {
    a[size_t(i) * size_t(n) + size_t(j)] = 1;
    a[size_t(j) * size_t(n) + size_t(i)] = 1;
  }
  std::vector<int> neighbors(int i) const {
    std::vector<int> r;
    for (int j = 0; j < n; ++j)
      if (at(i, j)) r.push_back(j);
    return r;
  }
  int edge_count() const {
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) c += at(i, j) ? 1 : 0;
    return c;
  }
  friend bool operator==(const Adjacency& x, const Adjacency& y) = default;
};

}  // namespace kronred
