// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string>

#include "kronred/errors.hpp"
#include "kronred/kernels.hpp"

namespace kronred::kernels {

#if defined(KRONRED_KERNEL_AVX2)
const Kernels& avx2_kernels();
#endif
#if defined(KRONRED_KERNEL_NEON)
const Kernels& neon_kernels();
#endif

std::vector<const Kernels*> available() {
  std::vector<const Kernels*> v{&scalar()};
#if defined(KRONRED_KERNEL_AVX2)
  if (__builtin_cpu_supports("avx2")) v.push_back(&avx2_kernels());
#endif
#if defined(KRONRED_KERNEL_NEON)
  v.push_back(&neon_kernels());
#endif
  return v;
}

namespace {

const Kernels* select() {
  const char* env = std::getenv("KRONRED_KERNELS");
  const std::string want = env ? env : "auto";
  const auto variants = available();
  if (want == "auto") return variants.back();  // best available
  for (const Kernels* k : variants)
    if (want == k->name) return k;
  throw ConfigError("KRONRED_KERNELS=" + want + " is not available in this build");
}

}  // namespace

const Kernels& active() {
  static const Kernels* chosen = select();
  return *chosen;
}

}  // namespace kronred::kernels
