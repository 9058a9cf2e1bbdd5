#pragma once

#include <cstdint>

namespace btem {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of child stream `index` of stream `parent`.
///
/// Every random quantity in the project is drawn from a stream reached by a
/// chain of derive_seed calls from a master seed, e.g.
///   master -> grid point -> trial -> {dataset -> example j, algorithm}.
/// Child seeds depend only on (parent, index), so streams can be created in
/// any order and on any thread.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based generator: output i is mix64(seed + (i + 1) * golden).
///
/// Satisfies UniformRandomBitGenerator, but the helpers below are used for
/// all draws so results do not depend on the standard library's
/// distribution implementations.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(seed_ + counter_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, bound); bound > 0 (Lemire's
  /// multiply-shift with rejection on the low word).
  std::uint64_t below(std::uint64_t bound) noexcept {
    auto x = (*this)();
    auto m = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<unsigned __int128>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// True with probability p.
  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace btem
