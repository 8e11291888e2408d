// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace kronred::kernels {

/// Data-parallel inner loops of candidate evaluation, over planar complex
/// arrays (separate re/im). Scalar reference implementations always exist;
/// AVX2 (x86-64) and NEON (aarch64) variants are selected at runtime and
/// equivalence-tested against the reference.
struct Kernels {
  const char* name;

  /// out += (cr + i*ci) * (p - q), elementwise over n complex entries.
  void (*axpy_diff)(std::size_t n, double cr, double ci, const double* p_re,
                    const double* p_im, const double* q_re, const double* q_im,
                    double* out_re, double* out_im);

  /// mag[k] = sqrt(re[k]^2 + im[k]^2)
  void (*magnitude)(std::size_t n, const double* re, const double* im, double* mag);

  /// max_k |(a - b)[k]| over complex entries.
  double (*max_abs_diff)(std::size_t n, const double* a_re, const double* a_im,
                         const double* b_re, const double* b_im);
};

/// The variant chosen for this process: CPU feature detection, overridable
/// with KRONRED_KERNELS=scalar|avx2|neon. Stable for the process lifetime.
const Kernels& active();

/// All variants compiled into this binary (for equivalence tests).
std::vector<const Kernels*> available();

const Kernels& scalar();

/// Planar storage for a complex vector, the layout the kernels consume.
struct PlanarVec {
  std::vector<double> re, im;

  PlanarVec() = default;
  explicit PlanarVec(std::size_t n) : re(n, 0.0), im(n, 0.0) {}
  std::size_t size() const { return re.size(); }
  void assign_from(const std::vector<std::complex<double>>& v) {
    re.resize(v.size());
    im.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      re[i] = v[i].real();
      im[i] = v[i].imag();
    }
  }
  std::vector<std::complex<double>> to_complex() const {
    std::vector<std::complex<double>> v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) v[i] = {re[i], im[i]};
    return v;
  }
};

}  // namespace kronred::kernels
