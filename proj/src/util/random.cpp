#include "annimpute/util/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace annimpute {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) {
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

double Rng::normal(double mean, double stddev) {
  if (spare_) {
    double z = *spare_;
    spare_.reset();
    return mean + stddev * z;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return mean + stddev * radius * std::cos(angle);
}

}  // namespace annimpute
