#ifndef MSEOL_RNG_HPP_
#define MSEOL_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mseol {

// Every random draw in the library goes through this class so results are
// bit-identical across standard libraries. The engine is std::mt19937_64,
// whose output sequence is fixed by the C++ standard; the std::*_distribution
// adaptors are not, so the conversions below are written out by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for a named purpose, e.g. Rng::derive(seed, "shuffle").
  static Rng derive(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller (one value per call, the pair partner is cached).
  double normal();

  /// Fisher-Yates, iterating from the back.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer; used to mix seeds with stream tags.
std::uint64_t mix64(std::uint64_t x);

}  // namespace mseol

#endif  // MSEOL_RNG_HPP_
