#include "bdris/simd/kernels.hpp"

#include <cmath>

namespace bdris::simd {
namespace {

cd dotu_scalar(const cd* x, const cd* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i].real(), b = x[i].imag();
    const double c = y[i].real(), d = y[i].imag();
    re += a * c - b * d;
    im += a * d + b * c;
  }
  return {re, im};
}

cd dotc_scalar(const cd* x, const cd* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i].real(), b = x[i].imag();
    const double c = y[i].real(), d = y[i].imag();
    re += a * c + b * d;
    im += a * d - b * c;
  }
  return {re, im};
}

// Horner evaluation of sum_m w_m z^m at z = exp(j*pi*cos_t).
void ula_power_scalar(const cd* w, std::size_t m, const double* cos_theta, std::size_t n_angles,
                      double* out) {
  for (std::size_t t = 0; t < n_angles; ++t) {
    if (m == 0) {
      out[t] = 0.0;
      continue;
    }
    const double zr = std::cos(kPi * cos_theta[t]);
    const double zi = std::sin(kPi * cos_theta[t]);
    double ar = w[m - 1].real(), ai = w[m - 1].imag();
    for (std::size_t j = m - 1; j-- > 0;) {
      const double nr = ar * zr - ai * zi + w[j].real();
      const double ni = ar * zi + ai * zr + w[j].imag();
      ar = nr;
      ai = ni;
    }
    out[t] = ar * ar + ai * ai;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &dotu_scalar, &dotc_scalar, &ula_power_scalar};
  return table;
}

}  // namespace bdris::simd
