#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "annimpute/core/matrix.hpp"

namespace annimpute {

struct HoldoutSplit {
  AnnotationMatrix train;
  std::vector<Cell> heldout_cells;  // in selection order
  std::uint64_t seed = 0;
};

// Withholds round(fraction * cells) annotations, spreading them across items
// and annotators. Cells are visited in a seeded order; a cell is accepted
// while its item and annotator are under their per-pass caps
// (ceil(target / distinct items), ceil(target / distinct annotators)), and
// the caps grow by one on each further pass. A row is never emptied.
//
// Throws UsageError for fraction outside (0,1) and DataError when the target
// cannot be met without emptying a row.
HoldoutSplit make_holdout(const AnnotationMatrix& matrix, double fraction, std::uint64_t seed);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of_item;

  [[nodiscard]] std::vector<std::size_t> items_in(std::size_t fold) const;
  [[nodiscard]] std::vector<std::size_t> items_not_in(std::size_t fold) const;
};

// Seeded shuffle of item indices dealt round-robin into k folds.
FoldAssignment make_kfolds(std::size_t n_items, std::size_t k, std::uint64_t seed);

// NDJSON manifests: {item, annotator, label} per heldout cell; {item, fold}.
std::vector<nlohmann::json> holdout_records(const HoldoutSplit& split);
std::vector<nlohmann::json> fold_records(const FoldAssignment& folds);

}  // namespace annimpute
