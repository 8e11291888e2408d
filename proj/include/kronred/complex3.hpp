// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "kronred/phase.hpp"

namespace kronred {

using cx = std::complex<double>;

/// Per-node 3-vector of complex phase quantities.
struct Vec3c {
  std::array<cx, 3> v{};

  cx& operator[](int i) { return v[size_t(i)]; }
  const cx& operator[](int i) const { return v[size_t(i)]; }

  Vec3c& operator+=(const Vec3c& o) {
    for (int i = 0; i < 3; ++i) v[size_t(i)] += o.v[size_t(i)];
    return *this;
  }
  Vec3c operator-(const Vec3c& o) const {
    Vec3c r;
    for (int i = 0; i < 3; ++i) r[i] = v[size_t(i)] - o.v[size_t(i)];
    return r;
  }
  double max_abs() const {
    double m = 0;
    for (const cx& z : v) m = std::max(m, std::abs(z));
    return m;
  }
};

/// Dense 3x3 complex block, row-major. The unit of storage for branch
/// admittances and for the blocks of the nodal admittance matrix.
struct Mat3c {
  std::array<cx, 9> m{};

  static Mat3c identity() {
    Mat3c r;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    return r;
  }
  static Mat3c zero() { return Mat3c{}; }

  cx& operator()(int r, int c) { return m[size_t(r * 3 + c)]; }
  const cx& operator()(int r, int c) const { return m[size_t(r * 3 + c)]; }

  Mat3c& operator+=(const Mat3c& o) {
    for (int i = 0; i < 9; ++i) m[size_t(i)] += o.m[size_t(i)];
    return *this;
  }
  Mat3c& operator-=(const Mat3c& o) {
    for (int i = 0; i < 9; ++i) m[size_t(i)] -= o.m[size_t(i)];
    return *this;
  }
  Mat3c operator-() const {
    Mat3c r;
    for (int i = 0; i < 9; ++i) r.m[size_t(i)] = -m[size_t(i)];
    return r;
  }
  Mat3c operator+(const Mat3c& o) const {
    Mat3c r = *this;
    r += o;
    return r;
  }
  Mat3c operator-(const Mat3c& o) const {
    Mat3c r = *this;
    r -= o;
    return r;
  }
  Mat3c operator*(const Mat3c& o) const {
    Mat3c r;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        const cx a = (*this)(i, k);
        if (a == cx{}) continue;
        for (int j = 0; j < 3; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }
  Vec3c operator*(const Vec3c& x) const {
    Vec3c r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i] += (*this)(i, j) * x[j];
    return r;
  }
  Mat3c transpose() const {
    Mat3c r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }
  bool is_zero() const {
    for (const cx& z : m)
      if (z != cx{}) return false;
    return true;
  }
  double max_abs() const {
    double r = 0;
    for (const cx& z : m) r = std::max(r, std::abs(z));
    return r;
  }
  /// Zero every row and column outside `mask`.
  Mat3c masked(PhaseMask mask) const {
    Mat3c r;
    for (int i = 0; i < 3; ++i) {
      if (!mask.has(i)) continue;
      for (int j = 0; j < 3; ++j)
        if (mask.has(j)) r(i, j) = (*this)(i, j);
    }
    return r;
  }
  /// True iff all rows/cols outside `mask` are exactly zero.
  bool confined_to(PhaseMask mask) const {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if ((!mask.has(i) || !mask.has(j)) && (*this)(i, j) != cx{}) return false;
    return true;
  }
};

/// Inverse of the principal submatrix on `mask` rows/cols, zero-padded back to
/// 3x3. This realizes the Moore-Penrose pseudo-inverse for blocks whose only
/// rank deficiency comes from structurally absent phases.
///
/// Returns false when the present-phase submatrix is singular; in that case
/// `smallest_pivot` holds the offending pivot magnitude.
bool masked_inverse(const Mat3c& in, PhaseMask mask, Mat3c& out, double& smallest_pivot,
                    double pivot_tol = 1e-13);

}  // namespace kronred
