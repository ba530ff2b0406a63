#include "annimpute/analysis/distribution.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "annimpute/core/stats.hpp"
#include "annimpute/errors.hpp"
#include "annimpute/kernels.hpp"

namespace annimpute::analysis {

DistributionDelta distribution_delta(const AnnotationMatrix& original, const LabelGrid& imputed) {
  if (imputed.rows() != original.n_items() || imputed.cols() != original.n_annotators()) {
    throw DataError("distribution_delta: imputed matrix shape does not match the original");
  }
  original.require_nonempty_rows();
  const std::size_t n = original.n_items();
  DistributionDelta out;
  out.per_item.resize(n);
  kernels::parallel_for(n, [&](std::size_t i) {
    const RowStats before = row_stats(original, i);
    const RowStats after = row_stats(imputed, i, original.schema());
    out.per_item[i] = {before.variance, after.variance, before.disagreement_rate,
                       after.disagreement_rate};
  });
  double var_sum = 0.0;
  double dis_sum = 0.0;
  for (const ItemDelta& d : out.per_item) {
    var_sum += d.variance_change();
    dis_sum += d.disagreement_change();
  }
  if (n > 0) {
    out.avg_variance_change = var_sum / static_cast<double>(n);
    out.avg_disagreement_change = dis_sum / static_cast<double>(n);
  }
  return out;
}

std::string_view to_string(Divergence kind) {
  switch (kind) {
    case Divergence::KL: return "kl";
    case Divergence::ReverseKL: return "reverse_kl";
    case Divergence::JS: return "js";
  }
  return "?";
}

Divergence divergence_from_string(std::string_view text) {
  if (text == "kl") return Divergence::KL;
  if (text == "reverse_kl") return Divergence::ReverseKL;
  if (text == "js") return Divergence::JS;
  throw UsageError("unknown divergence '" + std::string(text) + "'");
}

namespace {

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DataError(std::string("divergence: negative entry in ") + name);
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError(std::string("divergence: ") + name + " does not sum to 1");
}

std::vector<double> smooth(std::span<const double> p, double alpha) {
  std::vector<double> out(p.begin(), p.end());
  if (alpha == 0.0) return out;
  const double denom = 1.0 + static_cast<double>(p.size()) * alpha;
  for (double& v : out) v = (v + alpha) / denom;
  return out;
}

double kl_smoothed(const std::vector<double>& p, const std::vector<double>& q) {
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] == 0.0) continue;
    if (q[c] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[c] * std::log(p[c] / q[c]);
  }
  return sum;
}

void check_pair(std::span<const double> p, std::span<const double> q, double alpha) {
  if (p.size() != q.size()) throw DataError("divergence: length mismatch");
  if (!(alpha >= 0.0)) throw UsageError("divergence: alpha must be >= 0");
  check_distribution(p, "p");
  check_distribution(q, "q");
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q, double alpha) {
  check_pair(p, q, alpha);
  return kl_smoothed(smooth(p, alpha), smooth(q, alpha));
}

double js_divergence(std::span<const double> p, std::span<const double> q, double alpha) {
  check_pair(p, q, alpha);
  const auto ps = smooth(p, alpha);
  const auto qs = smooth(q, alpha);
  std::vector<double> mid(ps.size());
  for (std::size_t c = 0; c < ps.size(); ++c) mid[c] = 0.5 * (ps[c] + qs[c]);
  return 0.5 * kl_smoothed(ps, mid) + 0.5 * kl_smoothed(qs, mid);
}

double divergence(Divergence kind, std::span<const double> p, std::span<const double> q,
                  double alpha) {
  switch (kind) {
    case Divergence::KL: return kl_divergence(p, q, alpha);
    case Divergence::ReverseKL: return kl_divergence(q, p, alpha);
    case Divergence::JS: return js_divergence(p, q, alpha);
  }
  throw UsageError("unknown divergence");
}

}  // namespace annimpute::analysis
