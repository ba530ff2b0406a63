#pragma once

// Brute-force reference implementations shared by the unit and acceptance
// tests. They are written independently of the library code they check.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

// Full confusion matrix, then per-class F1 over the truth classes in
// ascending order, weighted by support.
inline double weighted_f1(std::span<const int> pred, std::span<const int> truth) {
  std::set<int> labels(truth.begin(), truth.end());
  labels.insert(pred.begin(), pred.end());
  std::map<std::pair<int, int>, long> confusion;  // (truth, pred) -> count
  for (std::size_t k = 0; k < truth.size(); ++k) ++confusion[{truth[k], pred[k]}];
  std::set<int> truth_classes(truth.begin(), truth.end());
  double total = 0.0;
  for (int c : truth_classes) {
    long tp = confusion[{c, c}];
    long row = 0, col = 0;
    for (int other : labels) {
      row += confusion[{c, other}];
      col += confusion[{other, c}];
    }
    const long fn = row - tp;
    const long fp = col - tp;
    const long denom = 2 * tp + fp + fn;
    const double f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    total += f1 * static_cast<double>(row);
  }
  return total / static_cast<double>(truth.size());
}

// Every (low, high) pair of observed rates with low < high and all three
// levels non-empty; smallest size variance, ties to the smaller low then
// high. Variance is compared as 3*sum(s^2) - n^2, an exact integer.
inline std::pair<double, double> best_levels(const std::vector<double>& rates) {
  std::set<double> distinct(rates.begin(), rates.end());
  const long n = static_cast<long>(rates.size());
  long best = -1;
  std::pair<double, double> out{0, 0};
  for (double lo : distinct) {
    for (double hi : distinct) {
      if (!(lo < hi)) continue;
      long a = 0, b = 0, c = 0;
      for (double r : rates) {
        if (r <= lo) ++a;
        else if (r >= hi) ++c;
        else ++b;
      }
      if (a == 0 || b == 0 || c == 0) continue;
      const long score = 3 * (a * a + b * b + c * c) - n * n;
      if (best < 0 || score < best) {
        best = score;
        out = {lo, hi};
      }
    }
  }
  return out;
}

// Direct sum p ln(p/q) without smoothing.
inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (q[k] == 0.0) return INFINITY;
    s += p[k] * std::log(p[k] / q[k]);
  }
  return s;
}

}  // namespace oracle
