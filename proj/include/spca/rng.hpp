#pragma once

// Counter-based randomness (Philox4x32-10). A stream is identified by
// (seed, stream id); draws depend only on that pair and the draw position, so
// per-row streams can be generated in any order or in parallel with identical
// results.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace spca {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform in (0, 1], 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; pairs are consumed in order.
  double gaussian() noexcept;
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  template <class T>
  void shuffle(std::vector<T>& items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  unsigned pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fills `out` with i.i.d. N(0,1) draws from stream (seed, row).
void fill_gaussian_row(std::uint64_t seed, std::uint64_t row, std::span<double> out) noexcept;

}  // namespace spca
