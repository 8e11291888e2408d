// SPDX-License-Identifier: Apache-2.0
//
// NEON variants of the planar complex kernels, 2 doubles per vector
// (aarch64 only).
#include "kronred/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace kronred::kernels {

namespace {

void axpy_diff_neon(std::size_t n, double cr, double ci, const double* p_re,
                    const double* p_im, const double* q_re, const double* q_im,
                    double* out_re, double* out_im) {
  const float64x2_t vcr = vdupq_n_f64(cr);
  const float64x2_t vci = vdupq_n_f64(ci);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t dr = vsubq_f64(vld1q_f64(p_re + k), vld1q_f64(q_re + k));
    const float64x2_t di = vsubq_f64(vld1q_f64(p_im + k), vld1q_f64(q_im + k));
    const float64x2_t orv =
        vaddq_f64(vld1q_f64(out_re + k), vsubq_f64(vmulq_f64(vcr, dr), vmulq_f64(vci, di)));
    const float64x2_t oiv =
        vaddq_f64(vld1q_f64(out_im + k), vaddq_f64(vmulq_f64(vcr, di), vmulq_f64(vci, dr)));
    vst1q_f64(out_re + k, orv);
    vst1q_f64(out_im + k, oiv);
  }
  for (; k < n; ++k) {
    const double dr = p_re[k] - q_re[k];
    const double di = p_im[k] - q_im[k];
    out_re[k] += cr * dr - ci * di;
    out_im[k] += cr * di + ci * dr;
  }
}

void magnitude_neon(std::size_t n, const double* re, const double* im, double* mag) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t r = vld1q_f64(re + k);
    const float64x2_t i = vld1q_f64(im + k);
    const float64x2_t s = vaddq_f64(vmulq_f64(r, r), vmulq_f64(i, i));
    vst1q_f64(mag + k, vsqrtq_f64(s));
  }
  for (; k < n; ++k) mag[k] = std::sqrt(re[k] * re[k] + im[k] * im[k]);
}

double max_abs_diff_neon(std::size_t n, const double* a_re, const double* a_im,
                         const double* b_re, const double* b_im) {
  float64x2_t vmax = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t dr = vsubq_f64(vld1q_f64(a_re + k), vld1q_f64(b_re + k));
    const float64x2_t di = vsubq_f64(vld1q_f64(a_im + k), vld1q_f64(b_im + k));
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dr, dr), vmulq_f64(di, di));
    vmax = vmaxq_f64(vmax, d2);
  }
  double m = vmaxvq_f64(vmax);
  for (; k < n; ++k) {
    const double dr = a_re[k] - b_re[k];
    const double di = a_im[k] - b_im[k];
    const double d2 = dr * dr + di * di;
    if (d2 > m) m = d2;
  }
  return std::sqrt(m);
}

}  // namespace

const Kernels& neon_kernels() {
  static const Kernels k{"neon", axpy_diff_neon, magnitude_neon, max_abs_diff_neon};
  return k;
}

}  // namespace kronred::kernels

#endif  // __aarch64__
