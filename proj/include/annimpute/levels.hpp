#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace annimpute {

enum class DisagreementLevel { Low, Medium, High };

std::string_view to_string(DisagreementLevel level);

struct DisagreementLevels {
  double low_threshold = 0.0;   // rate <= low  -> Low
  double high_threshold = 0.0;  // rate >= high -> High
  std::vector<DisagreementLevel> level_of_item;

  [[nodiscard]] std::array<std::size_t, 3> counts() const;
};

// Picks (low, high) among the distinct observed rates so that all three
// levels are non-empty and the variance of the level sizes is minimal; ties
// go to the smaller low threshold, then the smaller high threshold.
// Throws DataError when fewer than three distinct rates exist.
DisagreementLevels assign_disagreement_levels(std::span<const double> rates);

}  // namespace annimpute
