#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "annimpute/errors.hpp"
#include "annimpute/prompt/completion.hpp"
#include "annimpute/prompt/scoring.hpp"
#include "annimpute/prompt/shots.hpp"
#include "annimpute/util/json_io.hpp"
#include "commands.hpp"
#include "common.hpp"

#ifndef ANNIMPUTE_PROMPT_DIR
#define ANNIMPUTE_PROMPT_DIR "data/prompts"
#endif

namespace annimpute::cli {

namespace {

struct PromptgenCommand {
  DataOptions data;
  std::string imputed;
  std::string skeletons = std::string(ANNIMPUTE_PROMPT_DIR) + "/skeletons.json";
  std::string fillers = std::string(ANNIMPUTE_PROMPT_DIR) + "/fillers.json";
  std::vector<std::string> conditions{"combined", "original_only", "imputed_only"};
  std::vector<std::string> skeleton_ids;
  std::vector<std::string> versions;
  std::vector<std::string> deny_skeletons;
  std::vector<std::string> deny_versions;
  std::size_t annotators = 30;
  std::size_t max_original = 30;
  std::size_t max_imputed = 30;
  std::uint64_t seed = 42;
  std::string description;
  std::string description_file;
  std::string dataset_name = "dataset";
  std::string out;
};

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t annotator_seed(std::uint64_t seed, std::size_t annotator) {
  return seed * 0x9E3779B97F4A7C15ULL + annotator;
}

void run_promptgen(const PromptgenCommand& cmd) {
  const Dataset dataset = cmd.data.load_dataset();
  const AnnotationMatrix& matrix = dataset.matrix;
  const LabelSchema& schema = matrix.schema();
  const prompt::SkeletonCatalog skeletons = prompt::load_skeletons(cmd.skeletons);
  const prompt::FillerCatalog fillers = prompt::load_fillers(cmd.fillers);

  std::vector<prompt::Condition> conditions;
  for (const auto& c : cmd.conditions) conditions.push_back(prompt::condition_from_string(c));
  const bool needs_imputed = std::any_of(conditions.begin(), conditions.end(), [](auto c) {
    return c != prompt::Condition::OriginalOnly;
  });
  std::optional<LabelGrid> imputed;
  if (needs_imputed) {
    if (cmd.imputed.empty()) throw UsageError("combined and imputed_only conditions need --imputed");
    imputed = read_complete_csv(cmd.imputed, schema);
  }
  std::string description = cmd.description;
  if (!cmd.description_file.empty()) description = read_all(cmd.description_file);
  while (!description.empty() && (description.back() == '\n' || description.back() == '\r')) {
    description.pop_back();
  }

  // Lowest-response annotators among those with something to hold out.
  const auto counts = matrix.annotator_counts();
  std::vector<std::size_t> annotators;
  for (std::size_t j : prompt::select_low_response_annotators(matrix, matrix.n_annotators())) {
    if (counts[j] > 0 && annotators.size() < cmd.annotators) annotators.push_back(j);
  }

  const std::set<std::string> deny_skeletons(cmd.deny_skeletons.begin(), cmd.deny_skeletons.end());
  const std::set<std::string> deny_versions(cmd.deny_versions.begin(), cmd.deny_versions.end());
  std::set<std::string> wanted(cmd.skeleton_ids.begin(), cmd.skeleton_ids.end());
  for (const auto& id : wanted) (void)skeletons.find(id);

  RunDir run(cmd.out, "promptgen");
  run.add_input("annotations", cmd.data.annotations_path());
  run.add_input("texts", cmd.data.texts_path());
  run.add_input("schema", cmd.data.schema_path());
  run.add_input("skeletons", cmd.skeletons);
  run.add_input("fillers", cmd.fillers);
  if (imputed) run.add_input("imputed", cmd.imputed);
  save_schema(run.file("prompts/schema.json"), schema);

  std::vector<nlohmann::json> index;
  const prompt::ShotLimits limits{cmd.max_original, cmd.max_imputed};
  for (prompt::Condition condition : conditions) {
    for (const auto& skeleton : skeletons.skeletons) {
      if (!skeleton.serves(condition) || deny_skeletons.count(skeleton.id)) continue;
      if (!wanted.empty() && !wanted.count(skeleton.id)) continue;
      std::vector<prompt::PromptVersion> versions;
      if (cmd.versions.empty()) {
        versions = prompt::enumerate_versions(skeleton, fillers);
      } else {
        for (const auto& v : cmd.versions) versions.push_back(prompt::parse_version(v, fillers));
      }
      for (const auto& version : versions) {
        const std::string vtext = version.str();
        if (deny_versions.count(vtext)) continue;
        for (std::size_t annotator : annotators) {
          const prompt::ShotSet shots =
              prompt::assemble_shots(annotator, dataset, imputed ? &*imputed : nullptr, condition,
                                     annotator_seed(cmd.seed, annotator), limits);
          const std::string text =
              prompt::build_prompt(skeleton, fillers, version, shots, description, schema);
          const std::string name = cmd.dataset_name + "_" + std::string(prompt::to_string(condition)) +
                                   "_" + skeleton.id + "_" + vtext + "_" + std::to_string(annotator) +
                                   ".txt";
          std::ofstream(run.file("prompts/" + name), std::ios::binary) << text;
          index.push_back({{"file", name},
                           {"condition", std::string(prompt::to_string(condition))},
                           {"skeleton", skeleton.id},
                           {"version", vtext},
                           {"annotator", annotator},
                           {"target_item", shots.held_out.item},
                           {"truth", shots.held_out.label},
                           {"original_shots", shots.uses_original() ? shots.original.size() : 0},
                           {"imputed_shots", shots.uses_imputed() ? shots.imputed.size() : 0}});
        }
      }
    }
  }
  write_ndjson(run.file("prompts/index.ndjson"), index);
  spdlog::info("{} prompts for {} annotators", index.size(), annotators.size());

  run.set_config({{"conditions", cmd.conditions},
                  {"skeletons", cmd.skeleton_ids},
                  {"versions", cmd.versions},
                  {"deny_skeletons", cmd.deny_skeletons},
                  {"deny_versions", cmd.deny_versions},
                  {"annotators", cmd.annotators},
                  {"max_original", cmd.max_original},
                  {"max_imputed", cmd.max_imputed},
                  {"dataset_name", cmd.dataset_name},
                  {"description", description}});
  run.set_seeds({{"shots", cmd.seed}});
  const std::string hash = run.finish();
  std::cout << run.root().string() << "\n" << hash << "\n";
}

struct ScoreCommand {
  std::string prompts;
  std::string cache;
  std::string mode = "replay";
  prompt::EndpointConfig endpoint;
  long min_interval_ms = 0;
  std::string out;
};

void run_score(const ScoreCommand& cmd) {
  const fs::path prompt_dir = fs::path(cmd.prompts) / "prompts";
  const fs::path index_path = prompt_dir / "index.ndjson";
  const LabelSchema schema = load_schema(prompt_dir / "schema.json");
  const auto index = read_ndjson(index_path);
  if (index.empty()) throw DataError("no prompts listed in " + index_path.string());

  prompt::EndpointConfig endpoint = cmd.endpoint;
  endpoint.mode = cmd.mode == "live" ? prompt::CompletionMode::Live : prompt::CompletionMode::Replay;
  endpoint.min_interval = std::chrono::milliseconds(cmd.min_interval_ms);

  RunDir run(cmd.out, "score");
  run.add_input("prompt_index", index_path);
  if (fs::exists(cmd.cache)) run.add_input("cache", cmd.cache);

  prompt::CompletionCache cache(cmd.cache);
  prompt::CompletionClient client(endpoint, cache);

  std::map<prompt::RunKey, std::vector<prompt::ParsedPair>> results;
  std::vector<nlohmann::json> responses;
  for (const auto& entry : index) {
    const std::string file = entry.at("file").get<std::string>();
    const std::string text = read_all(prompt_dir / file);
    const prompt::CompletionRecord record = client.complete(text);
    const auto parsed = prompt::parse_response(record.raw_response, schema);
    const int truth = entry.at("truth").get<int>();
    prompt::RunKey key{prompt::condition_from_string(entry.at("condition").get<std::string>()),
                       entry.at("skeleton").get<std::string>(), entry.at("version").get<std::string>()};
    results[key].emplace_back(parsed, truth);
    responses.push_back({{"file", file},
                         {"prompt_hash", record.prompt_hash},
                         {"raw_response", record.raw_response},
                         {"parsed", parsed ? nlohmann::json(*parsed) : nlohmann::json()},
                         {"truth", truth}});
  }
  const auto scores = prompt::score_conditions(results, schema);

  std::string table = "condition,best_f1,best_skeleton,best_version\n";
  for (const auto& [condition, s] : scores) {
    table += std::string(prompt::to_string(condition)) + "," + format_real(s.best_f1) + "," +
             s.best_skeleton + "," + s.best_version + "\n";
  }
  std::ofstream(run.file("scores/table.csv")) << table;
  write_json_file(run.file("scores/scores.json"), prompt::scores_to_json(scores));
  write_ndjson(run.file("scores/responses.ndjson"), responses);

  run.set_config({{"mode", cmd.mode},
                  {"model", endpoint.model},
                  {"temperature", endpoint.temperature}});
  const std::string hash = run.finish();
  spdlog::info("{} network calls", client.network_calls());
  std::cout << table << run.root().string() << "\n" << hash << "\n";
}

}  // namespace

void add_promptgen(CLI::App& app) {
  auto cmd = std::make_shared<PromptgenCommand>();
  CLI::App* sub = app.add_subcommand("promptgen", "Write few-shot prompts for low-response annotators");
  cmd->data.add(sub);
  sub->add_option("--imputed", cmd->imputed, "Complete imputed CSV for imputed shots");
  sub->add_option("--skeletons", cmd->skeletons, "Skeleton catalog JSON")->capture_default_str();
  sub->add_option("--fillers", cmd->fillers, "Filler catalog JSON")->capture_default_str();
  sub->add_option("--condition", cmd->conditions, "combined, original_only, imputed_only")
      ->capture_default_str();
  sub->add_option("--skeleton", cmd->skeleton_ids, "Restrict to these skeleton ids");
  sub->add_option("--version", cmd->versions, "Filler versions such as v4.-1.0.-1.1 (default: all)");
  sub->add_option("--deny-skeleton", cmd->deny_skeletons, "Skeleton ids to skip");
  sub->add_option("--deny-version", cmd->deny_versions, "Versions to skip");
  sub->add_option("--annotators", cmd->annotators, "How many low-response annotators")
      ->capture_default_str();
  sub->add_option("--max-original", cmd->max_original)->capture_default_str();
  sub->add_option("--max-imputed", cmd->max_imputed)->capture_default_str();
  sub->add_option("--seed", cmd->seed, "Shot selection seed")->capture_default_str();
  sub->add_option("--description", cmd->description, "Dataset description text");
  sub->add_option("--description-file", cmd->description_file, "File holding the description");
  sub->add_option("--dataset-name", cmd->dataset_name, "Prefix of prompt file names")
      ->capture_default_str();
  sub->add_option("--out", cmd->out, "Run directory")->required();
  sub->callback([cmd] { run_promptgen(*cmd); });
}

void add_score(CLI::App& app) {
  auto cmd = std::make_shared<ScoreCommand>();
  CLI::App* sub = app.add_subcommand("score", "Complete prompts (live or replay) and score conditions");
  sub->add_option("--prompts", cmd->prompts, "A promptgen run directory")->required();
  sub->add_option("--cache", cmd->cache, "Completion cache (NDJSON)")->required();
  sub->add_option("--mode", cmd->mode, "replay or live")
      ->check(CLI::IsMember({"replay", "live"}))
      ->capture_default_str();
  sub->add_option("--model", cmd->endpoint.model)->capture_default_str();
  sub->add_option("--base-url", cmd->endpoint.base_url)->capture_default_str();
  sub->add_option("--temperature", cmd->endpoint.temperature)->capture_default_str();
  sub->add_option("--token-env", cmd->endpoint.token_env, "Environment variable holding the API token")
      ->capture_default_str();
  sub->add_option("--min-interval-ms", cmd->min_interval_ms, "Minimum gap between live requests")
      ->capture_default_str();
  sub->add_option("--out", cmd->out, "Run directory")->required();
  sub->callback([cmd] { run_score(*cmd); });
}

}  // namespace annimpute::cli
