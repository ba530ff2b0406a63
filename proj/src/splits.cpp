#include "annimpute/splits.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "annimpute/errors.hpp"
#include "annimpute/util/random.hpp"

namespace annimpute {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

HoldoutSplit make_holdout(const AnnotationMatrix& matrix, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw UsageError("holdout fraction must be in (0, 1)");
  }
  const auto cells = matrix.cells();
  const std::size_t target =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cells.size())));

  std::vector<std::size_t> row_size(matrix.n_items(), 0);
  std::vector<std::size_t> col_size(matrix.n_annotators(), 0);
  for (const Cell& c : cells) {
    ++row_size[c.item];
    ++col_size[c.annotator];
  }
  std::size_t removable = 0;
  for (std::size_t n : row_size) removable += n > 0 ? n - 1 : 0;
  if (target > removable) {
    throw DataError("holdout of " + std::to_string(target) +
                    " cells would leave an item without annotations");
  }

  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const auto distinct = [](const std::vector<std::size_t>& sizes) {
    std::size_t n = 0;
    for (std::size_t s : sizes) n += s > 0 ? 1 : 0;
    return std::max<std::size_t>(n, 1);
  };
  std::size_t item_cap = ceil_div(std::max<std::size_t>(target, 1), distinct(row_size));
  std::size_t annotator_cap = ceil_div(std::max<std::size_t>(target, 1), distinct(col_size));

  std::vector<std::size_t> item_taken(matrix.n_items(), 0);
  std::vector<std::size_t> annotator_taken(matrix.n_annotators(), 0);
  std::vector<bool> selected(cells.size(), false);
  std::vector<Cell> heldout;
  heldout.reserve(target);

  while (heldout.size() < target) {
    for (std::size_t idx : order) {
      if (heldout.size() == target) break;
      if (selected[idx]) continue;
      const Cell& c = cells[idx];
      if (item_taken[c.item] >= item_cap || annotator_taken[c.annotator] >= annotator_cap) continue;
      if (row_size[c.item] - item_taken[c.item] <= 1) continue;
      selected[idx] = true;
      ++item_taken[c.item];
      ++annotator_taken[c.annotator];
      heldout.push_back(c);
    }
    ++item_cap;
    ++annotator_cap;
  }

  std::vector<Cell> kept;
  kept.reserve(cells.size() - heldout.size());
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    if (!selected[idx]) kept.push_back(cells[idx]);
  }
  return HoldoutSplit{
      AnnotationMatrix(matrix.n_items(), matrix.n_annotators(), matrix.schema(), std::move(kept)),
      std::move(heldout), seed};
}

std::vector<std::size_t> FoldAssignment::items_in(std::size_t fold) const {
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < fold_of_item.size(); ++i) {
    if (fold_of_item[i] == fold) items.push_back(i);
  }
  return items;
}

std::vector<std::size_t> FoldAssignment::items_not_in(std::size_t fold) const {
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < fold_of_item.size(); ++i) {
    if (fold_of_item[i] != fold) items.push_back(i);
  }
  return items;
}

FoldAssignment make_kfolds(std::size_t n_items, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw UsageError("fold count must be positive");
  if (k > n_items) {
    throw UsageError("fold count " + std::to_string(k) + " exceeds item count " +
                     std::to_string(n_items));
  }
  std::vector<std::size_t> order(n_items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  FoldAssignment folds{k, std::vector<std::size_t>(n_items, 0)};
  for (std::size_t p = 0; p < n_items; ++p) folds.fold_of_item[order[p]] = p % k;
  return folds;
}

std::vector<nlohmann::json> holdout_records(const HoldoutSplit& split) {
  std::vector<nlohmann::json> records;
  for (const Cell& c : split.heldout_cells) {
    records.push_back({{"item", c.item}, {"annotator", c.annotator}, {"label", c.label}});
  }
  return records;
}

std::vector<nlohmann::json> fold_records(const FoldAssignment& folds) {
  std::vector<nlohmann::json> records;
  for (std::size_t i = 0; i < folds.fold_of_item.size(); ++i) {
    records.push_back({{"item", i}, {"fold", folds.fold_of_item[i]}});
  }
  return records;
}

}  // namespace annimpute
