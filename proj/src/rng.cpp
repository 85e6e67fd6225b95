#include "adapair/rng.hpp"

#include <cmath>
#include <numbers>

namespace adapair {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream), key_(mix64(mix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL))) {}

Rng Rng::substream(std::uint64_t id) const noexcept {
  return Rng(seed_, mix64(stream_ + 0x632BE59BD9B4E019ULL) ^ id);
}

std::uint64_t Rng::next_u64() noexcept {
  // Two rounds keep adjacent counters decorrelated.
  return mix64(mix64(key_ + counter_++ * 0x9E3779B97F4A7C15ULL) ^ key_);
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection of the biased low band.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform01() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace adapair
