// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "bdris/simd/kernels.hpp"

namespace bdris::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Sums of the even and odd lanes of v, returned as (even, odd).
inline void pair_sums(__m256d v, double& even, double& odd) {
  const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  even = _mm_cvtsd_f64(s);
  odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// Accumulates the four real partial products of a complex dot product:
// straight = [ac, bd, ...], crossed = [ad, bc, ...].
inline void accumulate(const cd* x, const cd* y, std::size_t n, double& ac, double& bd, double& ad,
                       double& bc) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d straight0 = _mm256_setzero_pd(), straight1 = _mm256_setzero_pd();
  __m256d crossed0 = _mm256_setzero_pd(), crossed1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
    const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
    const __m256d x1 = _mm256_loadu_pd(xp + 2 * i + 4);
    const __m256d y1 = _mm256_loadu_pd(yp + 2 * i + 4);
    straight0 = _mm256_fmadd_pd(x0, y0, straight0);
    crossed0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0b0101), crossed0);
    straight1 = _mm256_fmadd_pd(x1, y1, straight1);
    crossed1 = _mm256_fmadd_pd(x1, _mm256_permute_pd(y1, 0b0101), crossed1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
    const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
    straight0 = _mm256_fmadd_pd(x0, y0, straight0);
    crossed0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0b0101), crossed0);
  }
  pair_sums(_mm256_add_pd(straight0, straight1), ac, bd);
  pair_sums(_mm256_add_pd(crossed0, crossed1), ad, bc);
  for (; i < n; ++i) {
    const double a = x[i].real(), b = x[i].imag();
    const double c = y[i].real(), d = y[i].imag();
    ac += a * c;
    bd += b * d;
    ad += a * d;
    bc += b * c;
  }
}

cd dotu_avx2(const cd* x, const cd* y, std::size_t n) {
  double ac = 0, bd = 0, ad = 0, bc = 0;
  accumulate(x, y, n, ac, bd, ad, bc);
  return {ac - bd, ad + bc};
}

cd dotc_avx2(const cd* x, const cd* y, std::size_t n) {
  double ac = 0, bd = 0, ad = 0, bc = 0;
  accumulate(x, y, n, ac, bd, ad, bc);
  return {ac + bd, ad - bc};
}

// acc * z for two interleaved complex lanes.
inline __m256d cmul(__m256d acc, __m256d z_re, __m256d z_im) {
  const __m256d swapped = _mm256_permute_pd(acc, 0b0101);
  return _mm256_fmaddsub_pd(acc, z_re, _mm256_mul_pd(swapped, z_im));
}

// Two angles per register, two registers in flight; Horner over the element index.
void ula_power_avx2(const cd* w, std::size_t m, const double* cos_theta, std::size_t n_angles,
                    double* out) {
  if (m == 0) {
    for (std::size_t t = 0; t < n_angles; ++t) out[t] = 0.0;
    return;
  }
  const double* wp = reinterpret_cast<const double*>(w);
  std::size_t t = 0;
  for (; t + 4 <= n_angles; t += 4) {
    alignas(32) double zr[4], zi[4];
    for (int l = 0; l < 4; ++l) {
      zr[l] = std::cos(kPi * cos_theta[t + l]);
      zi[l] = std::sin(kPi * cos_theta[t + l]);
    }
    const __m256d zr0 = _mm256_setr_pd(zr[0], zr[0], zr[1], zr[1]);
    const __m256d zi0 = _mm256_setr_pd(zi[0], zi[0], zi[1], zi[1]);
    const __m256d zr1 = _mm256_setr_pd(zr[2], zr[2], zr[3], zr[3]);
    const __m256d zi1 = _mm256_setr_pd(zi[2], zi[2], zi[3], zi[3]);
    __m256d acc0 = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(wp + 2 * (m - 1)));
    __m256d acc1 = acc0;
    for (std::size_t j = m - 1; j-- > 0;) {
      const __m256d wj = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(wp + 2 * j));
      acc0 = _mm256_add_pd(cmul(acc0, zr0, zi0), wj);
      acc1 = _mm256_add_pd(cmul(acc1, zr1, zi1), wj);
    }
    alignas(32) double a0[4], a1[4];
    _mm256_store_pd(a0, acc0);
    _mm256_store_pd(a1, acc1);
    out[t + 0] = a0[0] * a0[0] + a0[1] * a0[1];
    out[t + 1] = a0[2] * a0[2] + a0[3] * a0[3];
    out[t + 2] = a1[0] * a1[0] + a1[1] * a1[1];
    out[t + 3] = a1[2] * a1[2] + a1[3] * a1[3];
  }
  if (t < n_angles) scalar_kernels().ula_power(w, m, cos_theta + t, n_angles - t, out + t);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2", &dotu_avx2, &dotc_avx2, &ula_power_avx2};
  return t;
}

}  // namespace bdris::simd::avx2
