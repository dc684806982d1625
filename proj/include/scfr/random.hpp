#pragma once

// Seeded pseudo-random numbers with a fixed, platform-independent
// algorithm. The engine is std::mt19937_64, whose output sequence the C++
// standard pins down exactly. Bounded integers use rejection sampling on
// the raw 64-bit output, uniform reals take the top 53 bits, and normal
// deviates use the Box-Muller transform. Nothing here goes through
// std::*_distribution, whose algorithms vary between standard libraries.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace scfr {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform real in [0, 1).
  double uniform01();

  /// Standard normal deviate.
  double normal();

  /// Fisher-Yates shuffle, walking from the back.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace scfr
