// SPDX-License-Identifier: Apache-2.0
#include "kronred/block_matrix.hpp"

namespace kronred {

void BlockMatrix::multiply(std::span<const cx> x, std::span<cx> y) const {
  for (cx& v : y) v = cx{};
  for (int i = 0; i < n_; ++i) {
    for (const auto& [j, b] : rows_[size_t(i)]) {
      const cx* xj = &x[size_t(3 * j)];
      cx* yi = &y[size_t(3 * i)];
      for (int r = 0; r < 3; ++r) {
        cx acc{};
        for (int c = 0; c < 3; ++c) acc += b(r, c) * xj[c];
        yi[r] += acc;
      }
    }
  }
}

void BlockMatrix::prune_zero_blocks() {
  for (auto& row : rows_) {
    for (auto it = row.begin(); it != row.end();) {
      if (it->second.is_zero())
        it = row.erase(it);
      else
        ++it;
    }
  }
}

}  // namespace kronred
