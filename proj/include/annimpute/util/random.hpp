#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>

namespace annimpute {

// Seeded generator with portable derived distributions.
//
// std::mt19937_64 is fully specified by the standard, but the standard
// distributions and std::shuffle are not, so seeded outputs (splits, shot
// selection, initial weights) would differ between standard libraries.
// Everything here is derived from the raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  // Box-Muller; the second deviate of each pair is cached.
  double normal(double mean, double stddev);

  // Fisher-Yates.
  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = below(i);
      using std::swap;
      swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace annimpute
