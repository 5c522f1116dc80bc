#pragma once

#include <cstdint>
#include <random>

namespace stickylab {

/// SplitMix64 finaliser; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream ids in use. Each species draws from its own substream so changing
/// one particle count never perturbs the other species' draws.
enum class Stream : std::uint64_t { rho = 0, eta = 1, grid_x = 2, grid_y = 3 };

constexpr std::uint64_t substream_seed(std::uint64_t seed, Stream stream) noexcept {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream) + 1));
}

/// mt19937_64 (bit-exact across platforms) with a portable uniform mapping;
/// std::uniform_real_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stickylab
