#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "annimpute/core/dataset.hpp"
#include "annimpute/imputer.hpp"
#include "annimpute/kernel_mf.hpp"
#include "annimpute/multitask.hpp"
#include "annimpute/ncf.hpp"

namespace annimpute::cli {

namespace fs = std::filesystem;

// Flat or nested JSON objects as CLI11 config; nested keys address
// subcommands.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

// --data DIR (texts.txt, annotations.csv, schema.json) or explicit files.
struct DataOptions {
  std::string data_dir;
  std::string texts;
  std::string annotations;
  std::string schema;

  void add(CLI::App* app);
  [[nodiscard]] fs::path texts_path() const;
  [[nodiscard]] fs::path annotations_path() const;
  [[nodiscard]] fs::path schema_path() const;

  [[nodiscard]] LabelSchema load_schema() const;
  [[nodiscard]] AnnotationMatrix load_matrix() const;
  [[nodiscard]] Dataset load_dataset() const;
  [[nodiscard]] bool has_texts() const;
};

// One output directory per invocation; a directory holding a manifest is
// never reused, a numeric suffix is appended instead.
class RunDir {
 public:
  RunDir(const fs::path& base, std::string command);

  [[nodiscard]] const fs::path& root() const noexcept { return root_; }
  // Absolute path for `relative`, creating parent directories.
  fs::path file(const fs::path& relative) const;

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seeds(nlohmann::json seeds) { seeds_ = std::move(seeds); }
  void add_input(const std::string& role, const fs::path& path);

  // Hashes every file under the run directory and writes manifest.json.
  // Returns the run hash.
  std::string finish();

 private:
  fs::path root_;
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json seeds_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::object();
};

struct ImputeOptions {
  std::string grid_preset = "full";  // full | small
  std::string grid_file;
  std::uint64_t seed = 42;            // kernel validation split
  double validation_fraction = 0.05;
  std::size_t ncf_epochs = 100;
  std::size_t mt_epochs = 10;
  double mt_learning_rate = 0.1;
  std::uint64_t mt_seed = 42;
  std::size_t encoder_dim = 1024;
  std::string embeddings;

  void add(CLI::App* app);
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::vector<KernelMFHyper> kernel_grid() const;
  [[nodiscard]] std::vector<NCFHyper> ncf_grid() const;
  [[nodiscard]] MultitaskHyper multitask_hyper() const;
  [[nodiscard]] EncoderConfig encoder() const;
};

struct MethodOutput {
  ImputedMatrices imputed;
  nlohmann::json model;
  nlohmann::json selection;  // chosen hyperparameters and grid scores
};

std::vector<std::string> parse_methods(const std::vector<std::string>& raw);

// Item features for the multitask model: embeddings file if given, else
// the hashed text encoding.
RealGrid item_features(const ImputeOptions& options, const std::vector<std::string>& texts,
                       std::size_t n_items);

// `features` is only read by the multitask method.
MethodOutput run_method(const std::string& method, const AnnotationMatrix& train,
                        const RealGrid* features, const ImputeOptions& options);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace annimpute::cli
