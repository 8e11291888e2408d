// SPDX-License-Identifier: Apache-2.0
//
// Reference kernels. These define the semantics the SIMD variants must
// reproduce; keep them branch-free and in evaluation order.
#include <cmath>

#include "kronred/kernels.hpp"

namespace kronred::kernels {

namespace {

void axpy_diff_scalar(std::size_t n, double cr, double ci, const double* p_re,
                      const double* p_im, const double* q_re, const double* q_im,
                      double* out_re, double* out_im) {
  for (std::size_t k = 0; k < n; ++k) {
    const double dr = p_re[k] - q_re[k];
    const double di = p_im[k] - q_im[k];
    out_re[k] += cr * dr - ci * di;
    out_im[k] += cr * di + ci * dr;
  }
}

void magnitude_scalar(std::size_t n, const double* re, const double* im, double* mag) {
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::sqrt(re[k] * re[k] + im[k] * im[k]);
}

double max_abs_diff_scalar(std::size_t n, const double* a_re, const double* a_im,
                           const double* b_re, const double* b_im) {
  double m = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dr = a_re[k] - b_re[k];
    const double di = a_im[k] - b_im[k];
    const double d2 = dr * dr + di * di;
    if (d2 > m) m = d2;
  }
  return std::sqrt(m);
}

}  // namespace

const Kernels& scalar() {
  static const Kernels k{"scalar", axpy_diff_scalar, magnitude_scalar, max_abs_diff_scalar};
  return k;
}

}  // namespace kronred::kernels
