#pragma once

#include <climits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "annimpute/core/schema.hpp"
#include "annimpute/prompt/skeleton.hpp"

namespace annimpute::prompt {

// Prediction value used for unparseable responses; never a schema label.
inline constexpr int kInvalidPrediction = INT_MIN;

// Whitespace removed, the remainder must be exactly a label's display text.
std::optional<int> parse_response(std::string_view raw, const LabelSchema& schema);

struct RunKey {
  Condition condition = Condition::OriginalOnly;
  std::string skeleton;
  std::string version;

  friend auto operator<=>(const RunKey&, const RunKey&) = default;
};

using ParsedPair = std::pair<std::optional<int>, int>;  // (parsed, truth)

struct ConditionScore {
  double best_f1 = 0.0;
  std::string best_skeleton;
  std::string best_version;
  std::map<std::pair<std::string, std::string>, double> f1_by_prompt;
};

// Weighted F1 per (skeleton, version); the best per condition, ties to the
// smaller skeleton id then version string. Throws DataError for an empty run.
std::map<Condition, ConditionScore> score_conditions(
    const std::map<RunKey, std::vector<ParsedPair>>& results, const LabelSchema& schema);

nlohmann::json scores_to_json(const std::map<Condition, ConditionScore>& scores);

}  // namespace annimpute::prompt
