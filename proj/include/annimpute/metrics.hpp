#pragma once

#include <span>

#include "annimpute/core/schema.hpp"

namespace annimpute {

// sqrt(mean((p - t)^2)). Throws UsageError on empty or mismatched input.
double rmse(std::span<const double> predictions, std::span<const double> truths);

// Support-weighted mean of per-class F1 over the classes present in
// `truths`. Predictions may contain values outside the truth classes (for
// example a reserved "invalid" class); they only count as false positives.
double weighted_f1(std::span<const int> predictions, std::span<const int> truths);

// As above, additionally requiring every label to lie in the schema.
double weighted_f1(std::span<const int> predictions, std::span<const int> truths,
                   const LabelSchema& schema);

}  // namespace annimpute
