#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace mrrh {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-based seedable generator. Streams are derived by hashing a
/// (seed, path) tuple, so adding a new consumer never perturbs the draws
/// of existing ones.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0x5851f42d4c957f2dull)) {}

  std::uint64_t next_u64() { return mix64(state_++); }

  /// Uniform in (0, 1].
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
  }

  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n) {
    // 128-bit multiply-shift; bias is < n / 2^64, irrelevant here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller. Two uniforms per draw, no cached spare,
  /// so the stream position is a pure function of the call count.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Child stream for a (seed, path) tuple, e.g. derive_stream(seed, {kLevels, n}).
inline Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p));
  return Rng(h);
}

// Stream purpose tags used across the library.
namespace stream {
inline constexpr std::uint64_t kPositions = 1;
inline constexpr std::uint64_t kLevels = 2;
inline constexpr std::uint64_t kPairing = 3;
inline constexpr std::uint64_t kResample = 4;
inline constexpr std::uint64_t kVerifySampling = 5;
inline constexpr std::uint64_t kInterferenceSampling = 6;
}  // namespace stream

}  // namespace mrrh
