#include "cli.hpp"

#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "annimpute/errors.hpp"
#include "annimpute/prompt/completion.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace annimpute::cli {

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumeric = 3;

int fail(int code, std::string_view kind, std::string_view what) {
  std::cerr << "annimpute: " << kind << ": " << what << "\n";
  return code;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Annotation imputation toolkit", "annimpute"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Only warnings and errors");

  add_synth(app);
  add_impute(app);
  add_evaluate(app);
  add_train_downstream(app);
  add_analyze(app);
  add_promptgen(app);
  add_score(app);
  for (CLI::App* sub : app.get_subcommands({})) {
    sub->set_config("--config", "", "JSON file of option values; flags override it");
    sub->config_formatter(std::make_shared<JsonConfig>());
  }

  // Logging is configured before any subcommand callback runs.
  app.parse_complete_callback([&] {
    auto logger = std::make_shared<spdlog::logger>(
        "annimpute", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
    logger->set_pattern("%^%l%$: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(verbose ? spdlog::level::debug
                              : quiet ? spdlog::level::warn : spdlog::level::info);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "annimpute: usage error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const UsageError& e) {
    return fail(kUsage, "usage error", e.what());
  } catch (const NumericError& e) {
    return fail(kNumeric, "numeric failure", e.what());
  } catch (const prompt::CacheMissError& e) {
    return fail(kData, "cache miss", e.what());
  } catch (const DataError& e) {
    return fail(kData, "data error", e.what());
  } catch (const prompt::EndpointError& e) {
    return fail(kData, "endpoint error", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kData, "data error", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kData, "data error", e.what());
  } catch (const std::exception& e) {
    return fail(kData, "error", e.what());
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("annimpute");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace annimpute::cli
