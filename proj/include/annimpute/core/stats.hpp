#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "annimpute/core/grid.hpp"
#include "annimpute/core/matrix.hpp"

namespace annimpute {

struct RowStats {
  int majority_label = 0;
  std::vector<double> soft_label;  // indexed by label - min_label
  double variance = 0.0;           // population variance
  double disagreement_rate = 0.0;  // share of annotations != majority_label
  std::size_t n_annotations = 0;
};

// Empirical label distribution; labels must be in the schema and non-empty.
std::vector<double> soft_label(std::span<const int> labels, const LabelSchema& schema);

// Mode of `labels`; ties go to the smallest label value.
int majority_label(std::span<const int> labels, const LabelSchema& schema);

// Throws DataError for an empty label list.
RowStats label_stats(std::span<const int> labels, const LabelSchema& schema);

// Statistics over the observed cells of one item.
RowStats row_stats(const AnnotationMatrix& matrix, std::size_t item);

// Statistics over all cells of one row of a complete label matrix.
RowStats row_stats(const LabelGrid& complete, std::size_t item, const LabelSchema& schema);

// Dense copy with missing cells set to `sentinel`.
RealGrid densify(const AnnotationMatrix& matrix, double sentinel = 10.0);

}  // namespace annimpute
