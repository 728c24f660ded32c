#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fdl {

/// xoshiro256** seeded through splitmix64.
///
/// Every derived draw (uniform_index, uniform01, normal) is defined in terms
/// of next() alone so that sequences can be reproduced outside C++.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform integer in [0, n) via the high half of a 64x64 multiply.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal by the Box-Muller transform; caches the second variate.
  double normal();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// splitmix64 step; advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// `count` distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::uint64_t seed);

}  // namespace fdl
