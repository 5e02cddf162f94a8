#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "iwtm/detail/check.hpp"

namespace iwtm {

// Deterministic random stream used throughout the library.
//
// The engine is the public-domain xoshiro256++ generator: a fixed algorithm
// over four 64-bit words, so a seed pins the exact same raw sequence on
// every platform and compiler.  The standard <random> distributions
// (bernoulli_distribution, uniform_int_distribution, std::shuffle) are
// implementation-defined, so every derived quantity is computed here from
// raw engine output; training, splitting, and trial repetition replay
// bit-identically from a seed anywhere.  Training cost is dominated by
// per-automaton coin flips, which is why the engine is a few arithmetic
// ops per draw rather than a large-state twister.
//
// Streams are split hierarchically: derive(tag) mixes the stream's own seed
// with the tag and returns an independent child stream.  derive() is a pure
// function of (seed, tag); it does not consume or disturb the parent's
// state, so components can be given private streams in any order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {
    // xoshiro256++ state must not be all zero.  Chaining each word through
    // the splitmix64 finalizer (the seeding its authors recommend) gives a
    // well-mixed, non-degenerate start for every seed, zero included.
    std::uint64_t x = seed;
    for (auto& word : state_) word = x = mix(x);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  // Child seed for the given tag.  Pure; never advances this stream.
  std::uint64_t derive_seed(std::uint64_t tag) const noexcept {
    return mix(seed_ + 0x9e3779b97f4a7c15ULL * (tag + 1));
  }

  RandomStream derive(std::uint64_t tag) const {
    return RandomStream(derive_seed(tag));
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 bits of precision.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // True with probability p.  p <= 0 is never, p >= 1 is always.
  bool bernoulli(double p) noexcept { return next_unit() < p; }

  // Uniform integer in [0, n).  Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    detail::require(n > 0, "RandomStream::below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Fisher-Yates shuffle; unlike std::shuffle the visit order is pinned.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  // splitmix64 finalizer; decorrelates consecutive / related seeds.
  static std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace iwtm
