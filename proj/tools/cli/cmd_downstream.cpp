#include <fstream>
#include <iostream>
#include <memory>

#include <spdlog/spdlog.h>

#include "annimpute/core/stats.hpp"
#include "annimpute/levels.hpp"
#include "annimpute/metrics.hpp"
#include "annimpute/splits.hpp"
#include "annimpute/util/json_io.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace annimpute::cli {

namespace {

struct DownstreamCommand {
  DataOptions data;
  ImputeOptions impute;
  std::string method = "ncf";
  std::size_t folds = 5;
  std::uint64_t fold_seed = 42;
  std::string out;
};

// Predictions and truths split by disagreement level (index 0 = all items).
struct Buckets {
  std::array<std::vector<int>, 4> pred;
  std::array<std::vector<int>, 4> truth;

  void add(std::size_t level_slot, int p, int t) {
    pred[0].push_back(p);
    truth[0].push_back(t);
    if (level_slot > 0) {
      pred[level_slot].push_back(p);
      truth[level_slot].push_back(t);
    }
  }
};

constexpr std::array<const char*, 4> kSlots{"all", "low", "medium", "high"};

struct Tally {
  std::array<double, 4> sum{};
  std::array<std::size_t, 4> folds{};

  void add(const Buckets& b) {
    for (std::size_t s = 0; s < 4; ++s) {
      if (b.truth[s].empty()) continue;
      sum[s] += weighted_f1(b.pred[s], b.truth[s]);
      ++folds[s];
    }
  }
  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t s = 0; s < 4; ++s) {
      j[kSlots[s]] = folds[s] ? nlohmann::json(sum[s] / static_cast<double>(folds[s])) : nlohmann::json();
    }
    return j;
  }
};

RealGrid select_rows(const RealGrid& grid, const std::vector<std::size_t>& rows) {
  RealGrid out(rows.size(), grid.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(grid.row(rows[r]).begin(), grid.row(rows[r]).end(), out.row(r).begin());
  }
  return out;
}

void run_downstream(const DownstreamCommand& cmd) {
  const std::string method = parse_methods({cmd.method}).front();
  const Dataset dataset = cmd.data.load_dataset();
  const AnnotationMatrix& matrix = dataset.matrix;
  const LabelSchema& schema = matrix.schema();
  const RealGrid features = item_features(cmd.impute, dataset.texts, matrix.n_items());

  std::vector<double> rates(matrix.n_items());
  for (std::size_t i = 0; i < matrix.n_items(); ++i) rates[i] = row_stats(matrix, i).disagreement_rate;
  std::optional<DisagreementLevels> levels;
  try {
    levels = assign_disagreement_levels(rates);
  } catch (const DataError& e) {
    spdlog::warn("no disagreement breakdown: {}", e.what());
  }
  auto slot_of = [&](std::size_t item) -> std::size_t {
    return levels ? static_cast<std::size_t>(levels->level_of_item[item]) + 1 : 0;
  };

  const FoldAssignment folds = make_kfolds(matrix.n_items(), cmd.folds, cmd.fold_seed);
  std::map<std::string, Tally> individual;
  std::map<std::string, Tally> aggregate;

  for (std::size_t f = 0; f < cmd.folds; ++f) {
    const auto train_items = folds.items_not_in(f);
    const auto test_items = folds.items_in(f);
    if (test_items.empty()) continue;
    const AnnotationMatrix train = matrix.select_items(train_items);
    const RealGrid train_features = select_rows(features, train_items);

    std::vector<std::pair<std::string, MultitaskModel>> models;
    models.emplace_back("original", multitask::train(train_features, train, cmd.impute.multitask_hyper(),
                                                     cmd.impute.encoder()));
    // The imputer only sees the training folds.
    const MethodOutput filled = run_method(method, train, &train_features, cmd.impute);
    const AnnotationMatrix completed = AnnotationMatrix::from_grid(filled.imputed.full_int, schema);
    models.emplace_back("imputed", multitask::train(train_features, completed,
                                                    cmd.impute.multitask_hyper(), cmd.impute.encoder()));

    for (const auto& [name, model] : models) {
      Buckets ind;
      Buckets agg;
      for (std::size_t item : test_items) {
        const auto x = features.row(item);
        const std::size_t slot = slot_of(item);
        for (const Cell& c : matrix.row(item)) {
          ind.add(slot, multitask::predict_individual(model, x, c.annotator), c.label);
        }
        agg.add(slot, multitask::predict_aggregate(model, x),
                majority_label(matrix.row_labels(item), schema));
      }
      individual[name].add(ind);
      aggregate[name].add(agg);
    }
    spdlog::info("fold {}/{} done", f + 1, cmd.folds);
  }

  RunDir run(cmd.out, "train-downstream");
  run.add_input("annotations", cmd.data.annotations_path());
  run.add_input("schema", cmd.data.schema_path());
  if (cmd.impute.embeddings.empty()) {
    run.add_input("texts", cmd.data.texts_path());
  } else {
    run.add_input("embeddings", cmd.impute.embeddings);
  }

  nlohmann::json results = nlohmann::json::object();
  std::string table = "data,prediction,all,low,medium,high\n";
  for (const char* name : {"original", "imputed"}) {
    results[name] = {{"individual", individual[name].to_json()},
                     {"aggregate", aggregate[name].to_json()}};
    for (const char* kind : {"individual", "aggregate"}) {
      table += std::string(name) + "," + kind;
      for (const char* slot : kSlots) {
        const auto& v = results[name][kind][slot];
        table += "," + (v.is_null() ? std::string() : format_real(v.get<double>()));
      }
      table += "\n";
    }
  }
  if (levels) {
    const auto counts = levels->counts();
    results["levels"] = {{"low_threshold", levels->low_threshold},
                         {"high_threshold", levels->high_threshold},
                         {"counts", counts}};
  }
  write_json_file(run.file("downstream/results.json"), results);
  std::ofstream(run.file("downstream/f1_table.csv")) << table;

  run.set_config({{"method", method}, {"folds", cmd.folds}, {"impute", cmd.impute.to_json()}});
  run.set_seeds({{"folds", cmd.fold_seed}, {"grid", cmd.impute.seed}, {"multitask", cmd.impute.mt_seed}});
  const std::string hash = run.finish();
  std::cout << table << run.root().string() << "\n" << hash << "\n";
}

}  // namespace

void add_train_downstream(CLI::App& app) {
  auto cmd = std::make_shared<DownstreamCommand>();
  CLI::App* sub = app.add_subcommand(
      "train-downstream", "K-fold multitask training on original vs imputed annotations");
  cmd->data.add(sub);
  cmd->impute.add(sub);
  sub->add_option("--method", cmd->method, "Imputer applied to the training folds")
      ->capture_default_str();
  sub->add_option("--folds", cmd->folds)->check(CLI::Range(2, 1000))->capture_default_str();
  sub->add_option("--fold-seed", cmd->fold_seed)->capture_default_str();
  sub->add_option("--out", cmd->out, "Run directory")->required();
  sub->callback([cmd] { run_downstream(*cmd); });
}

}  // namespace annimpute::cli
