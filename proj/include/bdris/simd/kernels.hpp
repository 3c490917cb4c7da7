#pragma once

#include <cstddef>
#include <span>

#include "bdris/types.hpp"

namespace bdris::simd {

/// Function table for the data-parallel inner loops. Every entry has a scalar reference
/// implementation; vector variants must agree with it to rounding.
struct KernelTable {
  const char* name;
  /// sum_i x_i * y_i
  cd (*dotu)(const cd* x, const cd* y, std::size_t n);
  /// sum_i conj(x_i) * y_i
  cd (*dotc)(const cd* x, const cd* y, std::size_t n);
  /// out_t = |sum_m w_m * exp(j*pi*m*cos_t)|^2 for each entry cos_t of cos_theta.
  void (*ula_power)(const cd* w, std::size_t m, const double* cos_theta, std::size_t n_angles,
                    double* out);
};

const KernelTable& scalar_kernels();
/// nullptr when the build or the running CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Table picked once per process: AVX2 when available, overridable with BDRIS_SIMD=scalar|avx2.
const KernelTable& active();

inline cd dotu(std::span<const cd> x, std::span<const cd> y) {
  if (x.size() != y.size()) throw InvalidArgument("dotu: length mismatch");
  return active().dotu(x.data(), y.data(), x.size());
}

inline cd dotc(std::span<const cd> x, std::span<const cd> y) {
  if (x.size() != y.size()) throw InvalidArgument("dotc: length mismatch");
  return active().dotc(x.data(), y.data(), x.size());
}

inline cd dotu(const CVec& x, const CVec& y) {
  return dotu(std::span<const cd>(x.data(), x.size()), std::span<const cd>(y.data(), y.size()));
}

inline cd dotc(const CVec& x, const CVec& y) {
  return dotc(std::span<const cd>(x.data(), x.size()), std::span<const cd>(y.data(), y.size()));
}

void ula_power(std::span<const cd> weights, std::span<const double> cos_theta,
               std::span<double> out);

}  // namespace bdris::simd
