#include "annimpute/prompt/scoring.hpp"

#include <cctype>

#include "annimpute/errors.hpp"
#include "annimpute/metrics.hpp"

namespace annimpute::prompt {

std::optional<int> parse_response(std::string_view raw, const LabelSchema& schema) {
  std::string compact;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  if (compact.empty()) return std::nullopt;
  for (int label = schema.min_label; label <= schema.max_label; ++label) {
    if (compact == schema.display(label)) return label;
  }
  return std::nullopt;
}

std::map<Condition, ConditionScore> score_conditions(
    const std::map<RunKey, std::vector<ParsedPair>>& results, const LabelSchema& schema) {
  std::map<Condition, ConditionScore> out;
  // The map iterates by (condition, skeleton, version), so a strict '>'
  // keeps the smallest skeleton id and version among equal scores.
  for (const auto& [key, pairs] : results) {
    if (pairs.empty()) {
      throw DataError("no results for " + std::string(to_string(key.condition)) + "/" +
                      key.skeleton + "/" + key.version);
    }
    std::vector<int> predictions;
    std::vector<int> truths;
    for (const auto& [parsed, truth] : pairs) {
      predictions.push_back(parsed.value_or(kInvalidPrediction));
      truths.push_back(truth);
    }
    for (int t : truths) {
      if (!schema.contains(t)) throw DataError("truth label outside the schema");
    }
    const double f1 = weighted_f1(predictions, truths);
    auto [it, fresh] = out.try_emplace(key.condition);
    ConditionScore& score = it->second;
    score.f1_by_prompt[{key.skeleton, key.version}] = f1;
    if (fresh || f1 > score.best_f1) {
      score.best_f1 = f1;
      score.best_skeleton = key.skeleton;
      score.best_version = key.version;
    }
  }
  return out;
}

nlohmann::json scores_to_json(const std::map<Condition, ConditionScore>& scores) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [condition, s] : scores) {
    nlohmann::json prompts = nlohmann::json::array();
    for (const auto& [k, f1] : s.f1_by_prompt) {
      prompts.push_back({{"skeleton", k.first}, {"version", k.second}, {"weighted_f1", f1}});
    }
    out.push_back({{"condition", std::string(to_string(condition))},
                   {"best_f1", s.best_f1},
                   {"best_skeleton", s.best_skeleton},
                   {"best_version", s.best_version},
                   {"prompts", prompts}});
  }
  return out;
}

}  // namespace annimpute::prompt
