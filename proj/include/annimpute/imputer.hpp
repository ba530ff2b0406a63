#pragma once

#include <cstddef>

#include "annimpute/core/grid.hpp"
#include "annimpute/core/matrix.hpp"
#include "annimpute/errors.hpp"
#include "annimpute/kernels.hpp"

namespace annimpute {

// Output of every imputer: observed cells keep their labels in both grids;
// missing cells hold the raw model value in full_raw and its schema label in
// full_int.
struct ImputedMatrices {
  LabelGrid full_int;
  RealGrid full_raw;
};

// Round half away from zero, then clamp into the schema.
int to_label(double raw, const LabelSchema& schema);

// Applies the imputer contract given a raw predictor `predict(item, annotator)`.
// `to_int` maps a missing cell's raw value to its label.
template <class Predict, class ToInt>
ImputedMatrices impute_cells(const AnnotationMatrix& train, Predict&& predict, ToInt&& to_int) {
  ImputedMatrices out{LabelGrid(train.n_items(), train.n_annotators()),
                      RealGrid(train.n_items(), train.n_annotators())};
  kernels::fill_cells(out.full_raw, predict);
  for (std::size_t i = 0; i < train.n_items(); ++i) {
    for (std::size_t j = 0; j < train.n_annotators(); ++j) {
      out.full_int(i, j) = to_int(i, j, out.full_raw(i, j));
    }
  }
  for (const Cell& c : train.cells()) {
    out.full_raw(c.item, c.annotator) = c.label;
    out.full_int(c.item, c.annotator) = c.label;
  }
  return out;
}

template <class Predict>
ImputedMatrices impute_cells(const AnnotationMatrix& train, Predict&& predict) {
  const LabelSchema& schema = train.schema();
  return impute_cells(train, std::forward<Predict>(predict),
                      [&schema](std::size_t, std::size_t, double raw) { return to_label(raw, schema); });
}

namespace serial {

template <class Predict>
ImputedMatrices impute_cells(const AnnotationMatrix& train, Predict&& predict) {
  ImputedMatrices out{LabelGrid(train.n_items(), train.n_annotators()),
                      RealGrid(train.n_items(), train.n_annotators())};
  kernels::serial::fill_cells(out.full_raw, predict);
  for (std::size_t i = 0; i < train.n_items(); ++i) {
    for (std::size_t j = 0; j < train.n_annotators(); ++j) {
      out.full_int(i, j) = to_label(out.full_raw(i, j), train.schema());
    }
  }
  for (const Cell& c : train.cells()) {
    out.full_raw(c.item, c.annotator) = c.label;
    out.full_int(c.item, c.annotator) = c.label;
  }
  return out;
}

}  // namespace serial

inline void require_same_shape(const AnnotationMatrix& train, std::size_t n_items,
                               std::size_t n_annotators) {
  if (train.n_items() != n_items || train.n_annotators() != n_annotators) {
    throw DataError("dimension mismatch between model and matrix");
  }
}

// Lowest score wins; earlier entries win ties.
template <class Hyper>
struct GridResult {
  Hyper best;
  double score = 0.0;
  std::vector<double> scores;  // per combo, NaN for failed combos
};

}  // namespace annimpute
