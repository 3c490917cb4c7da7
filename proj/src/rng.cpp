#include "bdris/rng.hpp"

#include <cmath>

namespace bdris {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit mantissa, shifted by one ulp so the result lies in (0, 1].
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t substream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream),
      substream_(substream) {}

std::array<std::uint32_t, 4> CounterRng::next_block() {
  const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index_),
                                         static_cast<std::uint32_t>(index_ >> 32), stream_,
                                         substream_};
  ++index_;
  return philox4x32_10(ctr, key_);
}

double CounterRng::uniform() {
  const auto b = next_block();
  return to_unit(b[0], b[1]);
}

cd CounterRng::complex_normal() {
  const auto b = next_block();
  const double u1 = to_unit(b[0], b[1]);
  const double u2 = to_unit(b[2], b[3]);
  // Box-Muller with per-component variance 1/2.
  const double r = std::sqrt(-std::log(u1));
  const double a = 2.0 * kPi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

cd CounterRng::unit_phase() {
  const double a = 2.0 * kPi * uniform();
  return {std::cos(a), std::sin(a)};
}

CMat complex_normal_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMat out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.complex_normal();
  return out;
}

}  // namespace bdris
