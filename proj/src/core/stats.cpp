#include "annimpute/core/stats.hpp"

#include <string>

#include "annimpute/errors.hpp"

namespace annimpute {

namespace {

std::vector<std::size_t> label_counts(std::span<const int> labels, const LabelSchema& schema) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(schema.num_labels()), 0);
  for (int label : labels) {
    if (!schema.contains(label)) {
      throw DataError("label out of range: " + std::to_string(label));
    }
    ++counts[schema.index_of(label)];
  }
  return counts;
}

std::size_t argmax_first(std::span<const std::size_t> counts) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  return best;
}

}  // namespace

std::vector<double> soft_label(std::span<const int> labels, const LabelSchema& schema) {
  if (labels.empty()) throw DataError("soft label of an empty row");
  auto counts = label_counts(labels, schema);
  std::vector<double> soft(counts.size());
  const double n = static_cast<double>(labels.size());
  for (std::size_t k = 0; k < counts.size(); ++k) soft[k] = static_cast<double>(counts[k]) / n;
  return soft;
}

int majority_label(std::span<const int> labels, const LabelSchema& schema) {
  if (labels.empty()) throw DataError("majority label of an empty row");
  return schema.label_at(argmax_first(label_counts(labels, schema)));
}

RowStats label_stats(std::span<const int> labels, const LabelSchema& schema) {
  if (labels.empty()) throw DataError("statistics of an empty row");
  auto counts = label_counts(labels, schema);
  const std::size_t n = labels.size();
  const std::size_t top = argmax_first(counts);

  RowStats stats;
  stats.n_annotations = n;
  stats.majority_label = schema.label_at(top);
  stats.soft_label.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    stats.soft_label[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
  }
  stats.disagreement_rate = static_cast<double>(n - counts[top]) / static_cast<double>(n);

  double sum = 0.0;
  for (int label : labels) sum += label;
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (int label : labels) sq += (label - mean) * (label - mean);
  stats.variance = sq / static_cast<double>(n);
  return stats;
}

RowStats row_stats(const AnnotationMatrix& matrix, std::size_t item) {
  return label_stats(matrix.row_labels(item), matrix.schema());
}

RowStats row_stats(const LabelGrid& complete, std::size_t item, const LabelSchema& schema) {
  if (item >= complete.rows()) throw DataError("item index out of range");
  return label_stats(complete.row(item), schema);
}

RealGrid densify(const AnnotationMatrix& matrix, double sentinel) {
  RealGrid dense(matrix.n_items(), matrix.n_annotators(), sentinel);
  for (const Cell& c : matrix.cells()) dense(c.item, c.annotator) = c.label;
  return dense;
}

}  // namespace annimpute
