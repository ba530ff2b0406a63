#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "annimpute/core/schema.hpp"

namespace annimpute::prompt {

struct ShotSet;

enum class Condition { Combined, OriginalOnly, ImputedOnly };

std::string_view to_string(Condition condition);
Condition condition_from_string(std::string_view text);

// The five optional text slots, in version-string order.
enum class FillerSlot {
  OrigExamplesHeader,
  ImputedExamplesHeader,
  TargetExampleHeader,
  Instructions,
  FinalWords,
};
inline constexpr std::size_t kFillerSlots = 5;
std::string_view slot_name(FillerSlot slot);

struct FillerCatalog {
  std::array<std::vector<std::string>, kFillerSlots> options;

  [[nodiscard]] const std::vector<std::string>& slot(FillerSlot s) const {
    return options[static_cast<std::size_t>(s)];
  }
};

// "vA.B.C.D.E": one option index per slot, -1 = slot omitted.
struct PromptVersion {
  std::array<int, kFillerSlots> index{-1, -1, -1, -1, -1};

  [[nodiscard]] std::string str() const;
  friend bool operator==(const PromptVersion&, const PromptVersion&) = default;
};

// Throws UsageError for malformed text or an index outside its slot.
PromptVersion parse_version(std::string_view text, const FillerCatalog& catalog);

struct PromptSkeleton {
  std::string id;
  std::string template_text;
  // Conditions the skeleton serves; empty for templates rendered through
  // render_template only.
  std::vector<Condition> conditions;

  [[nodiscard]] std::vector<std::string> placeholders() const;
  [[nodiscard]] bool serves(Condition condition) const;
};

struct SkeletonCatalog {
  std::vector<PromptSkeleton> skeletons;

  [[nodiscard]] const PromptSkeleton& find(std::string_view id) const;
};

// Substitutes {name} placeholders. A value of nullopt omits the slot: a line
// holding only that placeholder is removed with its newline, otherwise the
// placeholder becomes empty. Throws DataError for a placeholder missing from
// `values` and for unbalanced braces.
std::string render_template(std::string_view text,
                            const std::map<std::string, std::optional<std::string>>& values);

// "Example k:\nText: ...\nAnnotation from annotator: L" blocks joined by
// blank lines.
std::string format_examples(const std::vector<std::pair<std::string, int>>& shots,
                            const LabelSchema& schema);
std::string format_target(std::string_view text);

std::string build_prompt(const PromptSkeleton& skeleton, const FillerCatalog& catalog,
                         const PromptVersion& version, const ShotSet& shots,
                         std::string_view dataset_description, const LabelSchema& schema);
std::string build_prompt(const PromptSkeleton& skeleton, const FillerCatalog& catalog,
                         std::string_view version, const ShotSet& shots,
                         std::string_view dataset_description, const LabelSchema& schema);

// Every version over the filler slots the skeleton actually uses; unused
// slots stay at -1. Lexicographic in slot order.
std::vector<PromptVersion> enumerate_versions(const PromptSkeleton& skeleton,
                                              const FillerCatalog& catalog);

FillerCatalog fillers_from_json(const nlohmann::json& j);
nlohmann::json fillers_to_json(const FillerCatalog& catalog);
SkeletonCatalog skeletons_from_json(const nlohmann::json& j);
nlohmann::json skeletons_to_json(const SkeletonCatalog& catalog);
FillerCatalog load_fillers(const std::filesystem::path& path);
SkeletonCatalog load_skeletons(const std::filesystem::path& path);

}  // namespace annimpute::prompt
