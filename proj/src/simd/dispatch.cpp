#include <cstdlib>
#include <string>

#include "bdris/simd/kernels.hpp"

namespace bdris::simd {

#if defined(BDRIS_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

const KernelTable* avx2_kernels() {
#if defined(BDRIS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* env = std::getenv("BDRIS_SIMD");
    const std::string pref = env ? env : "auto";
    if (pref == "scalar") return scalar_kernels();
    if (const KernelTable* v = avx2_kernels()) return *v;
    return scalar_kernels();
  }();
  return chosen;
}

void ula_power(std::span<const cd> weights, std::span<const double> cos_theta,
               std::span<double> out) {
  if (out.size() != cos_theta.size()) throw InvalidArgument("ula_power: output length mismatch");
  active().ula_power(weights.data(), weights.size(), cos_theta.data(), cos_theta.size(),
                     out.data());
}

}  // namespace bdris::simd
