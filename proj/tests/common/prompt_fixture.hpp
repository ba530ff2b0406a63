#pragma once

#include <string>

#include <json.hpp>

#include "annimpute/prompt/shots.hpp"
#include "annimpute/prompt/skeleton.hpp"
#include "annimpute/util/json_io.hpp"
#include "helpers.hpp"

// Two published prompts rebuilt from their recorded shots.
namespace fixture {

struct PromptCase {
  std::string skeleton;
  std::string version;
  annimpute::prompt::ShotSet shots;
  std::string description;
  std::string golden;
};

inline annimpute::prompt::ShotSet shot_set(const nlohmann::json& j, annimpute::prompt::Condition c) {
  annimpute::prompt::ShotSet set;
  set.condition = c;
  auto& block = c == annimpute::prompt::Condition::ImputedOnly ? set.imputed : set.original;
  std::size_t item = 0;
  for (const auto& s : j.at("shots")) {
    block.push_back({item++, s.at("text").get<std::string>(), s.at("label").get<int>()});
  }
  set.held_out = {item, j.at("target").get<std::string>(), 0};
  return set;
}

inline std::vector<PromptCase> published_prompts() {
  const std::string dir = std::string(ANNIMPUTE_TEST_DATA) + "/prompts/";
  const auto j = annimpute::read_json_file(dir + "published_shots.json");
  using annimpute::prompt::Condition;
  return {
      {"imputed_1", "v-1.-1.-1.-1.-1", shot_set(j.at("imputed_prompt"), Condition::ImputedOnly), "",
       testutil::slurp(dir + "imputed_1_v-1.-1.-1.-1.-1.txt")},
      {"orig_1", "v4.-1.0.-1.1", shot_set(j.at("original_prompt"), Condition::OriginalOnly),
       j.at("description").get<std::string>(), testutil::slurp(dir + "orig_1_v4.-1.0.-1.1.txt")},
  };
}

inline annimpute::prompt::FillerCatalog fillers() {
  return annimpute::prompt::load_fillers(std::string(ANNIMPUTE_PROMPT_DIR) + "/fillers.json");
}

inline annimpute::prompt::SkeletonCatalog skeletons() {
  return annimpute::prompt::load_skeletons(std::string(ANNIMPUTE_PROMPT_DIR) + "/skeletons.json");
}

}  // namespace fixture
