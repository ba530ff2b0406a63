#include <iostream>
#include <memory>

#include "annimpute/synth.hpp"
#include "annimpute/util/json_io.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace annimpute::cli {

namespace {

struct SynthOptions {
  SynthConfig config;
  std::string out;
};

void run_synth(const SynthOptions& opt) {
  const SynthData data = make_synth(opt.config);
  RunDir run(opt.out, "synth");
  save_dataset(data.dataset, run.file("texts.txt"), run.file("annotations.csv"));
  save_schema(run.file("schema.json"), opt.config.schema);
  write_annotations_csv(run.file("truth.csv"), data.truth, opt.config.schema);
  write_annotations_csv(run.file("complete.csv"), data.complete, opt.config.schema);
  run.set_config({{"items", opt.config.items},
                  {"annotators", opt.config.annotators},
                  {"rank", opt.config.rank},
                  {"min_label", opt.config.schema.min_label},
                  {"max_label", opt.config.schema.max_label},
                  {"observed", opt.config.observed},
                  {"noise", opt.config.noise}});
  run.set_seeds({{"synth", opt.config.seed}});
  const std::string hash = run.finish();
  std::cout << run.root().string() << "\n" << hash << "\n";
}

}  // namespace

void add_synth(CLI::App& app) {
  auto opt = std::make_shared<SynthOptions>();
  CLI::App* sub = app.add_subcommand("synth", "Generate a low-rank synthetic annotation dataset");
  sub->add_option("--items", opt->config.items, "Number of items")->capture_default_str();
  sub->add_option("--annotators", opt->config.annotators, "Number of annotators")
      ->capture_default_str();
  sub->add_option("--rank", opt->config.rank, "Latent rank")->capture_default_str();
  sub->add_option("--min-label", opt->config.schema.min_label)->capture_default_str();
  sub->add_option("--max-label", opt->config.schema.max_label)->capture_default_str();
  sub->add_option("--observed", opt->config.observed, "Per-cell observation probability")
      ->capture_default_str();
  sub->add_option("--noise", opt->config.noise, "Std of Gaussian label noise")->capture_default_str();
  sub->add_option("--seed", opt->config.seed)->capture_default_str();
  sub->add_option("--out", opt->out, "Run directory")->required();
  sub->callback([opt] { run_synth(*opt); });
}

}  // namespace annimpute::cli
