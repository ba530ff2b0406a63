#include "annimpute/levels.hpp"

#include <algorithm>
#include <limits>

#include "annimpute/errors.hpp"

namespace annimpute {

std::string_view to_string(DisagreementLevel level) {
  switch (level) {
    case DisagreementLevel::Low: return "low";
    case DisagreementLevel::Medium: return "medium";
    case DisagreementLevel::High: return "high";
  }
  return "unknown";
}

std::array<std::size_t, 3> DisagreementLevels::counts() const {
  std::array<std::size_t, 3> out{0, 0, 0};
  for (auto level : level_of_item) ++out[static_cast<std::size_t>(level)];
  return out;
}

DisagreementLevels assign_disagreement_levels(std::span<const double> rates) {
  std::vector<double> distinct(rates.begin(), rates.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw DataError("disagreement levels need at least 3 distinct rates");
  }

  // prefix[k] = number of items with rate <= distinct[k].
  std::vector<std::size_t> prefix(distinct.size(), 0);
  for (double r : rates) {
    auto pos = std::lower_bound(distinct.begin(), distinct.end(), r) - distinct.begin();
    ++prefix[static_cast<std::size_t>(pos)];
  }
  for (std::size_t k = 1; k < prefix.size(); ++k) prefix[k] += prefix[k - 1];
  const std::size_t n = rates.size();

  // With the total fixed, minimal variance of sizes == minimal sum of squares.
  std::size_t best_low = 0, best_high = 0;
  std::size_t best_score = std::numeric_limits<std::size_t>::max();
  for (std::size_t a = 0; a + 2 < distinct.size(); ++a) {
    for (std::size_t b = a + 2; b < distinct.size(); ++b) {
      const std::size_t low = prefix[a];
      const std::size_t high = n - prefix[b - 1];
      const std::size_t medium = n - low - high;
      const std::size_t score = low * low + medium * medium + high * high;
      if (score < best_score) {
        best_score = score;
        best_low = a;
        best_high = b;
      }
    }
  }

  DisagreementLevels levels;
  levels.low_threshold = distinct[best_low];
  levels.high_threshold = distinct[best_high];
  levels.level_of_item.reserve(n);
  for (double r : rates) {
    levels.level_of_item.push_back(r <= levels.low_threshold    ? DisagreementLevel::Low
                                   : r >= levels.high_threshold ? DisagreementLevel::High
                                                                : DisagreementLevel::Medium);
  }
  return levels;
}

}  // namespace annimpute
