#include <fstream>
#include <iostream>
#include <memory>

#include <spdlog/spdlog.h>

#include "annimpute/analysis/records.hpp"
#include "annimpute/analysis/report_html.hpp"
#include "annimpute/errors.hpp"
#include "annimpute/util/json_io.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace annimpute::cli {

namespace {

struct AnalyzeCommand {
  DataOptions data;
  std::vector<std::string> imputed;  // name=path
  std::string from_run;
  double alpha = 1e-6;
  std::string divergence = "kl";
  double sentinel = 10.0;
  std::size_t report_items = 50;
  std::string title = "Imputation report";
  std::string out;
};

std::vector<std::pair<std::string, fs::path>> imputed_inputs(const AnalyzeCommand& cmd) {
  std::vector<std::pair<std::string, fs::path>> out;
  for (const auto& spec : cmd.imputed) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw UsageError("--imputed expects NAME=PATH, got '" + spec + "'");
    }
    out.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
  }
  if (!cmd.from_run.empty()) {
    const fs::path dir = fs::path(cmd.from_run) / "imputed";
    if (!fs::is_directory(dir)) throw DataError("no imputed/ directory in " + cmd.from_run);
    std::vector<std::pair<std::string, fs::path>> found;
    const std::string suffix = "_int.csv";
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > suffix.size() && name.ends_with(suffix)) {
        found.emplace_back(name.substr(0, name.size() - suffix.size()), entry.path());
      }
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  if (out.empty()) throw UsageError("give --imputed NAME=PATH or --from-run DIR");
  return out;
}

void run_analyze(const AnalyzeCommand& cmd) {
  const auto inputs = imputed_inputs(cmd);
  const AnnotationMatrix original = cmd.data.load_matrix();
  const LabelSchema& schema = original.schema();
  std::vector<std::string> texts;
  if (cmd.data.has_texts()) texts = read_texts(cmd.data.texts_path());

  analysis::MethodGrids grids;
  for (const auto& [name, path] : inputs) {
    LabelGrid grid = read_complete_csv(path, schema);
    if (grid.rows() != original.n_items() || grid.cols() != original.n_annotators()) {
      throw DataError("imputed matrix '" + name + "' does not match the annotations shape");
    }
    grids.emplace_back(name, std::move(grid));
  }

  RunDir run(cmd.out, "analyze");
  run.add_input("annotations", cmd.data.annotations_path());
  run.add_input("schema", cmd.data.schema_path());
  if (!texts.empty()) run.add_input("texts", cmd.data.texts_path());
  for (const auto& [name, path] : inputs) run.add_input("imputed:" + name, path);

  analysis::ReportData report;
  report.title = cmd.title;
  report.schema = schema;
  report.texts = texts;

  const auto pca_original = analysis::pca_project(original, cmd.sentinel);
  analysis::write_pca_csv(run.file("analysis/pca_original.csv"), pca_original);
  report.pca_panels.emplace_back("original", pca_original);

  nlohmann::json summary = nlohmann::json::object();
  summary["pca"]["original"] = {{"explained_variance", pca_original.explained_variance},
                                {"degenerate", pca_original.degenerate}};
  for (const auto& [name, grid] : grids) {
    const auto pca = analysis::pca_project(grid);
    analysis::write_pca_csv(run.file("analysis/pca_" + name + ".csv"), pca);
    report.pca_panels.emplace_back(name, pca);
    summary["pca"][name] = {{"explained_variance", pca.explained_variance},
                            {"degenerate", pca.degenerate}};

    auto delta = analysis::distribution_delta(original, grid);
    analysis::write_delta_records(run.file("analysis/deltas_" + name + ".ndjson"), delta);
    summary["deltas"][name] = analysis::delta_summary(delta);
    report.deltas.emplace_back(name, std::move(delta));
  }

  analysis::SoftLabelOptions options;
  options.alpha = cmd.alpha;
  options.kind = analysis::divergence_from_string(cmd.divergence);
  const auto soft = analysis::softlabel_report(original, grids, options);
  analysis::write_softlabel_records(run.file("analysis/softlabels.ndjson"), soft);
  summary["divergence"] = {{"kind", cmd.divergence},
                           {"alpha", cmd.alpha},
                           {"aggregate", analysis::aggregate_to_json(soft.aggregate)}};
  write_json_file(run.file("analysis/summary.json"), summary);

  report.aggregate = soft.aggregate;
  const std::size_t shown = std::min(cmd.report_items, soft.records.size());
  report.records.assign(soft.records.begin(), soft.records.begin() + static_cast<std::ptrdiff_t>(shown));
  std::ofstream(run.file("report.html")) << analysis::render_report_html(report);

  for (const auto& a : soft.aggregate) {
    spdlog::info("{}: {} {:.4f} +/- {:.4f}", a.method, cmd.divergence, a.mean, a.std);
  }
  run.set_config({{"methods", [&] {
                     std::vector<std::string> names;
                     for (const auto& g : grids) names.push_back(g.first);
                     return names;
                   }()},
                  {"alpha", cmd.alpha},
                  {"divergence", cmd.divergence},
                  {"sentinel", cmd.sentinel},
                  {"report_items", cmd.report_items},
                  {"title", cmd.title}});
  const std::string hash = run.finish();
  std::cout << run.root().string() << "\n" << hash << "\n";
}

}  // namespace

void add_analyze(CLI::App& app) {
  auto cmd = std::make_shared<AnalyzeCommand>();
  CLI::App* sub = app.add_subcommand(
      "analyze", "PCA, variance/disagreement deltas, soft-label divergence and HTML report");
  cmd->data.add(sub);
  sub->add_option("--imputed", cmd->imputed, "NAME=PATH of a complete imputed CSV (repeatable)");
  sub->add_option("--from-run", cmd->from_run, "Use every imputed/*_int.csv of an impute run");
  sub->add_option("--alpha", cmd->alpha, "Additive smoothing for divergences")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--divergence", cmd->divergence, "kl, reverse_kl or js")
      ->check(CLI::IsMember({"kl", "reverse_kl", "js"}))
      ->capture_default_str();
  sub->add_option("--sentinel", cmd->sentinel, "Fill value for missing cells before PCA")
      ->capture_default_str();
  sub->add_option("--report-items", cmd->report_items, "Examples shown in report.html")
      ->capture_default_str();
  sub->add_option("--title", cmd->title)->capture_default_str();
  sub->add_option("--out", cmd->out, "Run directory")->required();
  sub->callback([cmd] { run_analyze(*cmd); });
}

}  // namespace annimpute::cli
