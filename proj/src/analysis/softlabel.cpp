#include "annimpute/analysis/softlabel.hpp"

#include <cmath>

#include "annimpute/core/stats.hpp"
#include "annimpute/errors.hpp"
#include "annimpute/kernels.hpp"

namespace annimpute::analysis {

SoftLabelReport softlabel_report(const AnnotationMatrix& original, const MethodGrids& imputed_sets,
                                 const SoftLabelOptions& options) {
  for (const auto& [method, grid] : imputed_sets) {
    if (grid.rows() != original.n_items() || grid.cols() != original.n_annotators()) {
      throw DataError("softlabel_report: '" + method + "' does not match the original shape");
    }
  }
  original.require_nonempty_rows();
  const LabelSchema& schema = original.schema();
  const std::size_t n = original.n_items();

  SoftLabelReport report;
  report.records.resize(n);
  kernels::parallel_for(n, [&](std::size_t i) {
    SoftLabelRecord& rec = report.records[i];
    rec.item = i;
    rec.original = soft_label(original.row_labels(i), schema);
    double best = 0.0;
    for (const auto& [method, grid] : imputed_sets) {
      auto q = soft_label(grid.row(i), schema);
      const double d = divergence(options.kind, rec.original, q, options.alpha);
      if (rec.best_method.empty() || d < best) {
        best = d;
        rec.best_method = method;
      }
      rec.imputed_by_method.emplace_back(method, std::move(q));
      rec.kl_by_method.emplace_back(method, d);
    }
  });

  for (std::size_t k = 0; k < imputed_sets.size(); ++k) {
    MethodAggregate agg;
    agg.method = imputed_sets[k].first;
    if (n > 0) {
      double sum = 0.0;
      for (const auto& rec : report.records) sum += rec.kl_by_method[k].second;
      agg.mean = sum / static_cast<double>(n);
      double sq = 0.0;
      for (const auto& rec : report.records) {
        const double d = rec.kl_by_method[k].second - agg.mean;
        sq += d * d;
      }
      agg.std = std::sqrt(sq / static_cast<double>(n));
    }
    report.aggregate.push_back(agg);
  }
  return report;
}

}  // namespace annimpute::analysis
