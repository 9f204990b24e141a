#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spaceopt {

/// Seed for every stochastic operation in the library. The same seed with the
/// same inputs gives bit-identical results, independent of thread count.
struct RngSeed {
  std::uint64_t value = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Deterministically derive an independent sub-stream seed. Used to hand each
/// Monte Carlo batch / repeat / evaluation its own stream so that parallel
/// execution and partial prefixes stay reproducible.
inline RngSeed derive_seed(RngSeed base, std::uint64_t stream,
                           std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = base.value;
  h = detail::splitmix64(h ^ detail::splitmix64(stream ^ 0x1a2b3c4d5e6f7788ULL));
  h = detail::splitmix64(h ^ detail::splitmix64(a ^ 0x915f77f5511f8b0cULL));
  h = detail::splitmix64(h ^ detail::splitmix64(b ^ 0x6a09e667f3bcc909ULL));
  return RngSeed{h};
}

/// xoshiro256++ with hand-rolled uniform/normal draws. The standard library
/// engines are portable but its distributions are not, and we promise
/// byte-level reproducibility of every sampled quantity.
class Rng {
 public:
  explicit Rng(RngSeed seed) {
    std::uint64_t s = seed.value;
    for (auto& word : state_) {
      s = detail::splitmix64(s);
      word = s;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi); returns lo exactly when the interval is empty.
  double uniform(double lo, double hi) {
    return lo + uniform01() * (hi - lo);
  }

  /// Standard normal via Box-Muller (no caching, so draw i of a stream is a
  /// pure function of the stream prefix).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Unbiased integer in [0, n) via Lemire's multiply-shift.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::array<std::uint64_t, 4> state_;
};

/// Stream tags used with derive_seed so unrelated consumers of one master
/// seed never collide.
namespace streams {
inline constexpr std::uint64_t kPoints = 1;     // x-batch sampling
inline constexpr std::uint64_t kPosterior = 2;  // posterior sample draws
inline constexpr std::uint64_t kBootstrap = 3;  // median std-error bootstrap
inline constexpr std::uint64_t kEvals = 4;      // objective evaluations
inline constexpr std::uint64_t kSpaceGen = 5;   // subspace generation
inline constexpr std::uint64_t kFit = 6;        // model fitting
inline constexpr std::uint64_t kRepeat = 7;     // experiment repeats
inline constexpr std::uint64_t kPairs = 8;      // rank-preservation pairs
inline constexpr std::uint64_t kScore = 9;      // per-space scoring
inline constexpr std::uint64_t kTrials = 10;    // empirical score trials
}  // namespace streams

}  // namespace spaceopt
