#pragma once

#include <array>
#include <cstdint>

#include "bdris/types.hpp"

namespace bdris {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Stream identifiers. Each channel block draws from its own (stream, substream) pair so that
/// growing one dimension (more users, more elements) leaves all other draws unchanged.
enum class Stream : std::uint32_t {
  kBsRis = 1,
  kRisDl = 2,
  kRisUl = 3,
  kDirectDl = 4,
  kDirectUlBs = 5,
  kDirectUlDl = 6,
  kSelfInterference = 7,
  kSolverInit = 8,
  kTest = 0xFFFF,
};

/// Counter-based generator. The 64-bit seed is the Philox key; the counter words are
/// (draw index lo, draw index hi, stream, substream). Every complex normal consumes one block.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream, std::uint32_t substream = 0)
      : CounterRng(seed, static_cast<std::uint32_t>(stream), substream) {}
  CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t substream);

  /// Uniform on (0, 1].
  double uniform();
  /// Circularly-symmetric complex normal with E|z|^2 = 1.
  cd complex_normal();
  /// exp(j*2*pi*U).
  cd unit_phase();

  std::uint64_t position() const noexcept { return index_; }

 private:
  std::array<std::uint32_t, 4> next_block();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint32_t substream_;
  std::uint64_t index_ = 0;
};

/// Matrix of i.i.d. CN(0,1) entries, filled column-major.
CMat complex_normal_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols);

}  // namespace bdris
