#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace lrexp {

// SplitMix64 (Steele, Lea & Flood); used only to expand seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman & Vigna). Every random quantity in the library is
// drawn from one of these, seeded by (seed, stream) so that independent
// components never share a sequence.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  Xoshiro256(std::uint64_t seed, std::uint64_t stream) noexcept {
    SplitMix64 mix(stream_seed(seed, stream));
    for (auto& word : s_) word = mix.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Mixes a stream id into a seed; distinct streams give unrelated states.
  static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    SplitMix64 mix(stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return seed ^ mix.next();
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

// Standard normal draws via the basic Box-Muller transform; the second
// variate of each pair is cached and returned on the next call.
class NormalSampler {
 public:
  explicit NormalSampler(Xoshiro256 rng) noexcept : rng_(rng) {}

  double operator()() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - rng_.uniform();  // (0, 1]
    const double u2 = rng_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  Xoshiro256 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream ids used by the simulator and by model initialization.
namespace streams {
inline constexpr std::uint64_t kRowEffects = 1;
inline constexpr std::uint64_t kColEffects = 2;
inline constexpr std::uint64_t kRowFactors = 3;
inline constexpr std::uint64_t kColFactors = 4;
inline constexpr std::uint64_t kNoise = 5;
inline constexpr std::uint64_t kMissing = 6;
// Restart r of a fit draws its U, V start from stream kInitBase + r.
inline constexpr std::uint64_t kInitBase = 1000;
}  // namespace streams

// Seed of the i-th derived task (dataset, trial, ...) of a study.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  SplitMix64 mix(Xoshiro256::stream_seed(seed, 0xA5A5A5A5ULL + index));
  return mix.next();
}

}  // namespace lrexp
