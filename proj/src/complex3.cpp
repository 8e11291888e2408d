// SPDX-License-Identifier: Apache-2.0
#include "kronred/complex3.hpp"

#include <algorithm>
#include <limits>

namespace kronred {

bool masked_inverse(const Mat3c& in, PhaseMask mask, Mat3c& out, double& smallest_pivot,
                    double pivot_tol) {
  out = Mat3c::zero();
  smallest_pivot = 0.0;
  int idx[3];
  int k = 0;
  for (int p = 0; p < 3; ++p)
    if (mask.has(p)) idx[k++] = p;
  if (k == 0) return true;  // nothing present: pseudo-inverse of 0 is 0

  // Gauss-Jordan with partial pivoting on the k x k present submatrix.
  cx a[3][3];
  cx inv[3][3] = {};
  for (int i = 0; i < k; ++i) {
    inv[i][i] = 1.0;
    for (int j = 0; j < k; ++j) a[i][j] = in(idx[i], idx[j]);
  }
  smallest_pivot = std::numeric_limits<double>::infinity();
  for (int col = 0; col < k; ++col) {
    int piv = col;
    double best = std::abs(a[col][col]);
    for (int r = col + 1; r < k; ++r) {
      double m = std::abs(a[r][col]);
      if (m > best) {
        best = m;
        piv = r;
      }
    }
    smallest_pivot = std::min(smallest_pivot, best);
    if (best <= pivot_tol) return false;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(inv[piv], inv[col]);
    }
    const cx d = a[col][col];
    for (int j = 0; j < k; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      const cx f = a[r][col];
      if (f == cx{}) continue;
      for (int j = 0; j < k; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out(idx[i], idx[j]) = inv[i][j];
  return true;
}

}  // namespace kronred
