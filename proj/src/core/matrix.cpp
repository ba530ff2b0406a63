#include "annimpute/core/matrix.hpp"

#include <algorithm>
#include <string>

#include "annimpute/errors.hpp"

namespace annimpute {

AnnotationMatrix::AnnotationMatrix(std::size_t n_items, std::size_t n_annotators,
                                   LabelSchema schema, std::vector<Cell> cells)
    : n_items_(n_items),
      n_annotators_(n_annotators),
      schema_(std::move(schema)),
      cells_(std::move(cells)) {
  schema_.validate();
  for (const Cell& c : cells_) {
    if (c.item >= n_items_ || c.annotator >= n_annotators_) {
      throw DataError("cell (" + std::to_string(c.item) + "," +
                      std::to_string(c.annotator) + ") outside matrix bounds");
    }
    if (!schema_.contains(c.label)) {
      throw DataError("label out of range: " + std::to_string(c.label) + " at (" +
                      std::to_string(c.item) + "," + std::to_string(c.annotator) + ")");
    }
  }
  std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
    return a.item != b.item ? a.item < b.item : a.annotator < b.annotator;
  });
  auto dup = std::adjacent_find(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
    return a.item == b.item && a.annotator == b.annotator;
  });
  if (dup != cells_.end()) {
    throw DataError("duplicate cell (" + std::to_string(dup->item) + "," +
                    std::to_string(dup->annotator) + ")");
  }
  row_offsets_.assign(n_items_ + 1, 0);
  for (const Cell& c : cells_) ++row_offsets_[c.item + 1];
  for (std::size_t i = 0; i < n_items_; ++i) row_offsets_[i + 1] += row_offsets_[i];
}

AnnotationMatrix AnnotationMatrix::from_grid(const LabelGrid& grid, LabelSchema schema) {
  std::vector<Cell> cells;
  cells.reserve(grid.rows() * grid.cols());
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) cells.push_back({i, j, grid(i, j)});
  }
  return AnnotationMatrix(grid.rows(), grid.cols(), std::move(schema), std::move(cells));
}

std::span<const Cell> AnnotationMatrix::row(std::size_t item) const {
  if (item >= n_items_) throw DataError("item index out of range");
  return std::span<const Cell>(cells_).subspan(row_offsets_[item],
                                               row_offsets_[item + 1] - row_offsets_[item]);
}

std::vector<int> AnnotationMatrix::row_labels(std::size_t item) const {
  std::vector<int> labels;
  for (const Cell& c : row(item)) labels.push_back(c.label);
  return labels;
}

std::optional<int> AnnotationMatrix::at(std::size_t item, std::size_t annotator) const {
  auto cells = row(item);
  auto it = std::lower_bound(cells.begin(), cells.end(), annotator,
                             [](const Cell& c, std::size_t j) { return c.annotator < j; });
  if (it == cells.end() || it->annotator != annotator) return std::nullopt;
  return it->label;
}

std::vector<std::size_t> AnnotationMatrix::annotator_counts() const {
  std::vector<std::size_t> counts(n_annotators_, 0);
  for (const Cell& c : cells_) ++counts[c.annotator];
  return counts;
}

AnnotationMatrix AnnotationMatrix::select_items(std::span<const std::size_t> items) const {
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < items.size(); ++k) {
    for (const Cell& c : row(items[k])) cells.push_back({k, c.annotator, c.label});
  }
  return AnnotationMatrix(items.size(), n_annotators_, schema_, std::move(cells));
}

void AnnotationMatrix::require_nonempty_rows() const {
  for (std::size_t i = 0; i < n_items_; ++i) {
    if (row_offsets_[i + 1] == row_offsets_[i]) {
      throw DataError("item " + std::to_string(i) + " has zero annotations");
    }
  }
}

}  // namespace annimpute
