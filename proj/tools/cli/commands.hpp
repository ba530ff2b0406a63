#pragma once

#include <CLI11.hpp>

namespace annimpute::cli {

void add_synth(CLI::App& app);
void add_impute(CLI::App& app);
void add_evaluate(CLI::App& app);
void add_train_downstream(CLI::App& app);
void add_analyze(CLI::App& app);
void add_promptgen(CLI::App& app);
void add_score(CLI::App& app);

}  // namespace annimpute::cli
