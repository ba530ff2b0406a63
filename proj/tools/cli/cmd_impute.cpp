#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include <spdlog/spdlog.h>

#include "annimpute/metrics.hpp"
#include "annimpute/splits.hpp"
#include "annimpute/util/json_io.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace annimpute::cli {

namespace {

struct ImputeCommand {
  DataOptions data;
  ImputeOptions impute;
  std::vector<std::string> methods{"ncf"};
  std::string out;
};

void run_impute(const ImputeCommand& cmd) {
  const auto methods = parse_methods(cmd.methods);
  const bool needs_text = std::find(methods.begin(), methods.end(), "multitask") != methods.end();
  const AnnotationMatrix matrix = cmd.data.load_matrix();

  std::optional<RealGrid> features;
  std::vector<std::string> texts;
  if (needs_text) {
    if (cmd.impute.embeddings.empty()) texts = read_texts(cmd.data.texts_path());
    features = item_features(cmd.impute, texts, matrix.n_items());
  }

  RunDir run(cmd.out, "impute");
  run.add_input("annotations", cmd.data.annotations_path());
  run.add_input("schema", cmd.data.schema_path());
  if (needs_text && cmd.impute.embeddings.empty()) run.add_input("texts", cmd.data.texts_path());
  if (!cmd.impute.embeddings.empty()) run.add_input("embeddings", cmd.impute.embeddings);

  for (const auto& method : methods) {
    spdlog::info("imputing with {}", method);
    const MethodOutput result =
        run_method(method, matrix, features ? &*features : nullptr, cmd.impute);
    write_json_file(run.file("models/" + method + ".json"), result.model);
    write_json_file(run.file("models/" + method + "_selection.json"), result.selection);
    write_annotations_csv(run.file("imputed/" + method + "_int.csv"), result.imputed.full_int,
                          matrix.schema());
    write_real_csv(run.file("imputed/" + method + "_raw.csv"), result.imputed.full_raw);
  }

  run.set_config({{"methods", methods}, {"impute", cmd.impute.to_json()}});
  run.set_seeds({{"grid", cmd.impute.seed}, {"multitask", cmd.impute.mt_seed}});
  const std::string hash = run.finish();
  std::cout << run.root().string() << "\n" << hash << "\n";
}

struct EvaluateCommand {
  DataOptions data;
  ImputeOptions impute;
  std::vector<std::string> methods{"kernel,ncf,multitask"};
  std::vector<std::uint64_t> seeds{42, 43, 44};
  double holdout = 0.05;
  std::string dataset_name = "dataset";
  std::string out;
};

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void run_evaluate(const EvaluateCommand& cmd) {
  const auto methods = parse_methods(cmd.methods);
  if (cmd.seeds.empty()) throw UsageError("--seeds needs at least one seed");
  const bool needs_text = std::find(methods.begin(), methods.end(), "multitask") != methods.end();
  const AnnotationMatrix matrix = cmd.data.load_matrix();
  std::optional<RealGrid> features;
  if (needs_text) {
    std::vector<std::string> texts;
    if (cmd.impute.embeddings.empty()) texts = read_texts(cmd.data.texts_path());
    features = item_features(cmd.impute, texts, matrix.n_items());
  }

  RunDir run(cmd.out, "evaluate");
  run.add_input("annotations", cmd.data.annotations_path());
  run.add_input("schema", cmd.data.schema_path());
  if (needs_text && cmd.impute.embeddings.empty()) run.add_input("texts", cmd.data.texts_path());

  std::vector<std::string> rows{"mean"};
  rows.insert(rows.end(), methods.begin(), methods.end());
  std::map<std::string, std::vector<double>> per_seed;
  std::string runs_csv = "method,seed,rmse\n";

  for (std::uint64_t seed : cmd.seeds) {
    const HoldoutSplit split = make_holdout(matrix, cmd.holdout, seed);
    std::vector<double> truths;
    for (const Cell& c : split.heldout_cells) truths.push_back(c.label);

    double sum = 0.0;
    for (const Cell& c : split.train.cells()) sum += c.label;
    const double mean = sum / static_cast<double>(split.train.size());
    std::vector<double> baseline(truths.size(), mean);
    per_seed["mean"].push_back(rmse(baseline, truths));

    for (const auto& method : methods) {
      const MethodOutput result =
          run_method(method, split.train, features ? &*features : nullptr, cmd.impute);
      std::vector<double> preds;
      for (const Cell& c : split.heldout_cells) {
        preds.push_back(result.imputed.full_raw(c.item, c.annotator));
      }
      per_seed[method].push_back(rmse(preds, truths));
    }
    for (const auto& name : rows) {
      runs_csv += name + "," + std::to_string(seed) + "," + format_real(per_seed[name].back()) + "\n";
    }
  }

  std::string table = "method," + cmd.dataset_name + "\n";
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& name : rows) {
    const double med = median(per_seed[name]);
    table += name + "," + format_real(med) + "\n";
    summary.push_back({{"method", name}, {"median_rmse", med}, {"rmse_by_seed", per_seed[name]}});
    spdlog::info("{}: median heldout RMSE {:.4f}", name, med);
  }
  {
    std::ofstream(run.file("evaluate/rmse_table.csv")) << table;
    std::ofstream(run.file("evaluate/rmse_runs.csv")) << runs_csv;
  }
  write_json_file(run.file("evaluate/summary.json"), summary);

  run.set_config({{"methods", methods},
                  {"holdout", cmd.holdout},
                  {"dataset_name", cmd.dataset_name},
                  {"impute", cmd.impute.to_json()}});
  run.set_seeds({{"holdout", cmd.seeds}, {"grid", cmd.impute.seed}, {"multitask", cmd.impute.mt_seed}});
  const std::string hash = run.finish();
  std::cout << table << run.root().string() << "\n" << hash << "\n";
}

}  // namespace

void add_impute(CLI::App& app) {
  auto cmd = std::make_shared<ImputeCommand>();
  CLI::App* sub = app.add_subcommand("impute", "Grid-search, train and impute with one or more methods");
  cmd->data.add(sub);
  cmd->impute.add(sub);
  sub->add_option("--method", cmd->methods, "kernel, ncf, multitask (comma separated)")
      ->capture_default_str();
  sub->add_option("--out", cmd->out, "Run directory")->required();
  sub->callback([cmd] { run_impute(*cmd); });
}

void add_evaluate(CLI::App& app) {
  auto cmd = std::make_shared<EvaluateCommand>();
  CLI::App* sub = app.add_subcommand("evaluate", "Heldout RMSE of each imputer, median over seeds");
  cmd->data.add(sub);
  cmd->impute.add(sub);
  sub->add_option("--method", cmd->methods, "Methods to compare")->capture_default_str();
  sub->add_option("--seeds", cmd->seeds, "One holdout split per seed")->capture_default_str();
  sub->add_option("--holdout", cmd->holdout, "Share of cells held out")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--dataset-name", cmd->dataset_name, "Column name in the RMSE table")
      ->capture_default_str();
  sub->add_option("--out", cmd->out, "Run directory")->required();
  sub->callback([cmd] { run_evaluate(*cmd); });
}

}  // namespace annimpute::cli
