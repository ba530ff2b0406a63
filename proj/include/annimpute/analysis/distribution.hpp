#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "annimpute/core/grid.hpp"
#include "annimpute/core/matrix.hpp"

namespace annimpute::analysis {

struct ItemDelta {
  double variance_before = 0.0;
  double variance_after = 0.0;
  double disagreement_before = 0.0;
  double disagreement_after = 0.0;

  [[nodiscard]] double variance_change() const { return variance_after - variance_before; }
  [[nodiscard]] double disagreement_change() const {
    return disagreement_after - disagreement_before;
  }
};

struct DistributionDelta {
  std::vector<ItemDelta> per_item;
  double avg_variance_change = 0.0;
  double avg_disagreement_change = 0.0;
};

// Before: observed cells of each row. After: all cells of the imputed row,
// with its majority recomputed there. Throws DataError on shape mismatch or
// an empty original row.
DistributionDelta distribution_delta(const AnnotationMatrix& original, const LabelGrid& imputed);

enum class Divergence { KL, ReverseKL, JS };

std::string_view to_string(Divergence kind);
Divergence divergence_from_string(std::string_view text);

// sum p'_c ln(p'_c / q'_c) with p' = (p + alpha) / (1 + K alpha), likewise
// q'. Zero p'_c terms contribute 0; a positive p'_c over q'_c = 0 gives +inf.
// Throws DataError on length mismatch, negative entries or sums off 1.
double kl_divergence(std::span<const double> p, std::span<const double> q, double alpha = 1e-6);

// Jensen-Shannon divergence of the smoothed distributions (natural log).
double js_divergence(std::span<const double> p, std::span<const double> q, double alpha = 1e-6);

// KL(p||q), KL(q||p) or JS, where p is the original distribution.
double divergence(Divergence kind, std::span<const double> p, std::span<const double> q,
                  double alpha = 1e-6);

}  // namespace annimpute::analysis
