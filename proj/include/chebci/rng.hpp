#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>

namespace chebci {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

} // namespace detail

// xoshiro256** stream seeded from (master_seed, stream_id).
//
// Stream derivation: key = mix(mix(master_seed) + golden * (stream_id + 1)),
// then the four state words are the next four outputs of a SplitMix64
// sequence started at key. Distinct stream ids give unrelated states.
//
// Gaussians use Box-Muller on two uniforms, returning the cosine variate
// first and caching the sine variate for the next call, so every pair of
// normals consumes exactly two 64-bit outputs.
//
// Satisfies UniformRandomBitGenerator. Single owner: do not share one
// stream between threads.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : stream_id_(stream_id) {
    std::uint64_t sm = detail::splitmix64_mix(detail::splitmix64_mix(master_seed) +
                                              detail::golden_gamma * (stream_id + 1));
    for (auto& word : state_) {
      sm += detail::golden_gamma;
      word = detail::splitmix64_mix(sm);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double next_gaussian() noexcept {
    if (cached_) {
      const double z = *cached_;
      cached_.reset();
      return z;
    }
    const double u1 = 1.0 - next_uniform(); // (0, 1]
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

  std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
  std::uint64_t state_[4]{};
  std::uint64_t stream_id_;
  std::optional<double> cached_;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
  return RngStream(master_seed, stream_id);
}

} // namespace chebci
