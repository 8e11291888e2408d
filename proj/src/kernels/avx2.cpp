// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants of the planar complex kernels, 4 doubles per vector.
// Compiled with -mavx2 and picked at runtime only when the CPU reports AVX2.
#include "kronred/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace kronred::kernels {

namespace {

void axpy_diff_avx2(std::size_t n, double cr, double ci, const double* p_re,
                    const double* p_im, const double* q_re, const double* q_im,
                    double* out_re, double* out_im) {
  const __m256d vcr = _mm256_set1_pd(cr);
  const __m256d vci = _mm256_set1_pd(ci);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dr = _mm256_sub_pd(_mm256_loadu_pd(p_re + k), _mm256_loadu_pd(q_re + k));
    const __m256d di = _mm256_sub_pd(_mm256_loadu_pd(p_im + k), _mm256_loadu_pd(q_im + k));
    const __m256d orv = _mm256_add_pd(
        _mm256_loadu_pd(out_re + k),
        _mm256_sub_pd(_mm256_mul_pd(vcr, dr), _mm256_mul_pd(vci, di)));
    const __m256d oiv = _mm256_add_pd(
        _mm256_loadu_pd(out_im + k),
        _mm256_add_pd(_mm256_mul_pd(vcr, di), _mm256_mul_pd(vci, dr)));
    _mm256_storeu_pd(out_re + k, orv);
    _mm256_storeu_pd(out_im + k, oiv);
  }
  for (; k < n; ++k) {
    const double dr = p_re[k] - q_re[k];
    const double di = p_im[k] - q_im[k];
    out_re[k] += cr * dr - ci * di;
    out_im[k] += cr * di + ci * dr;
  }
}

void magnitude_avx2(std::size_t n, const double* re, const double* im, double* mag) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d r = _mm256_loadu_pd(re + k);
    const __m256d i = _mm256_loadu_pd(im + k);
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(i, i));
    _mm256_storeu_pd(mag + k, _mm256_sqrt_pd(s));
  }
  for (; k < n; ++k) mag[k] = std::sqrt(re[k] * re[k] + im[k] * im[k]);
}

double max_abs_diff_avx2(std::size_t n, const double* a_re, const double* a_im,
                         const double* b_re, const double* b_im) {
  __m256d vmax = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dr = _mm256_sub_pd(_mm256_loadu_pd(a_re + k), _mm256_loadu_pd(b_re + k));
    const __m256d di = _mm256_sub_pd(_mm256_loadu_pd(a_im + k), _mm256_loadu_pd(b_im + k));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
    vmax = _mm256_max_pd(vmax, d2);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > m) m = lanes[l];
  for (; k < n; ++k) {
    const double dr = a_re[k] - b_re[k];
    const double di = a_im[k] - b_im[k];
    const double d2 = dr * dr + di * di;
    if (d2 > m) m = d2;
  }
  return std::sqrt(m);
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{"avx2", axpy_diff_avx2, magnitude_avx2, max_abs_diff_avx2};
  return k;
}

}  // namespace kronred::kernels

#endif  // __AVX2__
