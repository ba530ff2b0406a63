#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace annimpute {

// Valid integer label range for one dataset.
//
// `scale` maps file values to stored labels: stored = file value * scale.
// A dataset with half-step labels (0, 0.5, 1) loads with scale 2 as {0,1,2};
// min_label/max_label are always in stored units.
struct LabelSchema {
  int min_label = 0;
  int max_label = 1;
  std::vector<std::string> label_names;
  int scale = 1;

  [[nodiscard]] int num_labels() const noexcept { return max_label - min_label + 1; }
  [[nodiscard]] bool contains(int label) const noexcept {
    return label >= min_label && label <= max_label;
  }
  [[nodiscard]] std::size_t index_of(int label) const noexcept {
    return static_cast<std::size_t>(label - min_label);
  }
  [[nodiscard]] int label_at(std::size_t index) const noexcept {
    return min_label + static_cast<int>(index);
  }
  [[nodiscard]] double range() const noexcept {
    return static_cast<double>(max_label - min_label);
  }

  // File-facing text of a stored label ("0.5" for label 1 at scale 2).
  [[nodiscard]] std::string display(int label) const;

  // Throws DataError when an invariant does not hold.
  void validate() const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;
};

LabelSchema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const LabelSchema& schema);
LabelSchema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const LabelSchema& schema);

}  // namespace annimpute
