#pragma once

#include <cstdint>
#include <utility>

namespace adapair {

/// Counter-based generator: draw k of stream s under seed x is a pure function
/// of (x, s, k), so sequences are identical on every platform and substreams
/// never overlap. Distributions are implemented here rather than taken from
/// <random>, whose distribution algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  /// Independent child stream; does not advance this generator.
  Rng substream(std::uint64_t id) const noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform integer in [0, bound); bound must be > 0. Unbiased (rejection).
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;
  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// In-place Fisher-Yates shuffle driven by Rng.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    const auto j = static_cast<decltype(i)>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    using std::swap;
    swap(first[i], first[j]);
  }
}

}  // namespace adapair
