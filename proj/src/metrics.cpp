#include "annimpute/metrics.hpp"

#include <cmath>
#include <map>
#include <string>

#include "annimpute/errors.hpp"

namespace annimpute {

double rmse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw UsageError("rmse: length mismatch");
  if (predictions.empty()) throw UsageError("rmse: empty input");
  double sum = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const double d = predictions[k] - truths[k];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predictions.size()));
}

double weighted_f1(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.size() != truths.size()) throw UsageError("weighted_f1: length mismatch");
  if (predictions.empty()) throw UsageError("weighted_f1: empty input");

  struct Tally {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  };
  std::map<int, Tally> tallies;
  for (std::size_t k = 0; k < truths.size(); ++k) {
    ++tallies[truths[k]].support;
    if (predictions[k] == truths[k]) {
      ++tallies[truths[k]].tp;
    } else {
      ++tallies[truths[k]].fn;
      ++tallies[predictions[k]].fp;
    }
  }
  double total = 0.0;
  for (const auto& [label, t] : tallies) {
    if (t.support == 0) continue;
    const std::size_t denom = 2 * t.tp + t.fp + t.fn;
    const double f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(t.tp) / static_cast<double>(denom);
    total += f1 * static_cast<double>(t.support);
  }
  return total / static_cast<double>(truths.size());
}

double weighted_f1(std::span<const int> predictions, std::span<const int> truths,
                   const LabelSchema& schema) {
  for (std::span<const int> labels : {predictions, truths}) {
    for (int label : labels) {
      if (!schema.contains(label)) {
        throw DataError("weighted_f1: label out of range: " + std::to_string(label));
      }
    }
  }
  return weighted_f1(predictions, truths);
}

}  // namespace annimpute
