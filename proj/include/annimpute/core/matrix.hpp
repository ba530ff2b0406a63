#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "annimpute/core/grid.hpp"
#include "annimpute/core/schema.hpp"

namespace annimpute {

struct Cell {
  std::size_t item = 0;
  std::size_t annotator = 0;
  int label = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Sparse N x M annotation matrix. Only observed cells are stored; cells are
// kept sorted by (item, annotator) with per-item offsets. Immutable after
// construction.
class AnnotationMatrix {
 public:
  AnnotationMatrix() = default;

  // Throws DataError for out-of-range indices or labels and duplicate cells.
  AnnotationMatrix(std::size_t n_items, std::size_t n_annotators, LabelSchema schema,
                   std::vector<Cell> cells);

  // Every cell of `grid` becomes an observed cell.
  static AnnotationMatrix from_grid(const LabelGrid& grid, LabelSchema schema);

  [[nodiscard]] std::size_t n_items() const noexcept { return n_items_; }
  [[nodiscard]] std::size_t n_annotators() const noexcept { return n_annotators_; }
  [[nodiscard]] const LabelSchema& schema() const noexcept { return schema_; }
  [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
  [[nodiscard]] bool empty() const noexcept { return cells_.empty(); }

  [[nodiscard]] std::span<const Cell> cells() const noexcept { return cells_; }
  [[nodiscard]] std::span<const Cell> row(std::size_t item) const;
  [[nodiscard]] std::vector<int> row_labels(std::size_t item) const;
  [[nodiscard]] std::optional<int> at(std::size_t item, std::size_t annotator) const;
  [[nodiscard]] bool has(std::size_t item, std::size_t annotator) const {
    return at(item, annotator).has_value();
  }

  // Number of annotations made by each annotator.
  [[nodiscard]] std::vector<std::size_t> annotator_counts() const;

  // Sub-matrix of the given items (in the given order), annotators unchanged.
  [[nodiscard]] AnnotationMatrix select_items(std::span<const std::size_t> items) const;

  // Throws DataError naming the first item with no annotations.
  void require_nonempty_rows() const;

  friend bool operator==(const AnnotationMatrix&, const AnnotationMatrix&) = default;

 private:
  std::size_t n_items_ = 0;
  std::size_t n_annotators_ = 0;
  LabelSchema schema_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> row_offsets_{0};
};

}  // namespace annimpute
