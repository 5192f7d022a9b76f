#pragma once

#include "risq/errors.hpp"
#include "risq/types.hpp"

#include <cmath>
#include <cstdint>

namespace risq {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// Seedable deterministic random stream (xoshiro256++ seeded via
/// splitmix64). Substreams derived from (seed, index) are statistically
/// independent and do not depend on how much the parent stream has been
/// consumed, so batch/replication loops produce identical results
/// regardless of evaluation order or worker count.
///
/// All distributions are generated from the raw 64-bit output with fixed
/// arithmetic, so sequences are reproducible across standard library
/// implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (std::uint64_t& word : state_) {
      sm = detail::splitmix64(sm);
      word = sm;
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent stream derived from this stream's seed and `index`.
  RandomStream substream(std::uint64_t index) const {
    return RandomStream(detail::splitmix64(seed_ ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL)));
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

  /// Uniform draw in [0, 1) with 53-bit resolution.
  scalar_t uniform() { return static_cast<scalar_t>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (pairs cached).
  scalar_t normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    scalar_t u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    const scalar_t u2 = uniform();
    const scalar_t r = std::sqrt(-2.0 * std::log(u1));
    const scalar_t a = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in {0, ..., n-1}.
  index_t uniform_int(index_t n) {
    if (n <= 0) throw ArgumentError("uniform_int: n must be positive");
    auto k = static_cast<index_t>(uniform() * static_cast<scalar_t>(n));
    return k < n ? k : n - 1;
  }

  /// Inverse-CDF draw from a probability vector (or any Eigen expression).
  template <typename Derived>
  index_t categorical(const Eigen::MatrixBase<Derived>& probs) {
    const scalar_t u = uniform();
    scalar_t acc = 0;
    index_t last_positive = 0;
    for (index_t i = 0; i < probs.size(); ++i) {
      const scalar_t p = probs[i];
      if (p <= 0) continue;
      last_positive = i;
      acc += p;
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
  scalar_t cached_normal_ = 0;
  bool have_cached_normal_ = false;
};

}  // namespace risq
