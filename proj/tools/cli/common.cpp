#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "annimpute/errors.hpp"
#include "annimpute/text_encoder.hpp"
#include "annimpute/util/digest.hpp"
#include "annimpute/util/json_io.hpp"

namespace annimpute::cli {

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void flatten(const nlohmann::json& j, const std::vector<std::string>& parents,
             std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      auto nested = parents;
      nested.push_back(key);
      flatten(value, nested, out);
      continue;
    }
    if (value.is_null()) continue;
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& e : value) item.inputs.push_back(scalar_text(e));
    } else {
      item.inputs.push_back(scalar_text(value));
    }
    out.push_back(std::move(item));
  }
}

nlohmann::json score_list(const std::vector<double>& scores) {
  nlohmann::json out = nlohmann::json::array();
  for (double s : scores) out.push_back(std::isfinite(s) ? nlohmann::json(s) : nlohmann::json());
  return out;
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& results = opt->results();
      j[name] = results.size() == 1 ? nlohmann::json(results.front()) : nlohmann::json(results);
    } else if (default_also && !opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j.dump(2);
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  nlohmann::json j;
  try {
    input >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
  std::vector<CLI::ConfigItem> items;
  flatten(j, {}, items);
  return items;
}

void DataOptions::add(CLI::App* app) {
  app->add_option("--data", data_dir, "Directory holding texts.txt, annotations.csv, schema.json");
  app->add_option("--texts", texts, "One text per item");
  app->add_option("--annotations", annotations, "Items x annotators CSV, empty = missing");
  app->add_option("--schema", schema, "Label schema JSON");
}

fs::path DataOptions::texts_path() const {
  if (!texts.empty()) return texts;
  if (data_dir.empty()) throw UsageError("--texts or --data is required");
  return fs::path(data_dir) / "texts.txt";
}

fs::path DataOptions::annotations_path() const {
  if (!annotations.empty()) return annotations;
  if (data_dir.empty()) throw UsageError("--annotations or --data is required");
  return fs::path(data_dir) / "annotations.csv";
}

fs::path DataOptions::schema_path() const {
  if (!schema.empty()) return schema;
  if (data_dir.empty()) throw UsageError("--schema or --data is required");
  return fs::path(data_dir) / "schema.json";
}

LabelSchema DataOptions::load_schema() const { return annimpute::load_schema(schema_path()); }

AnnotationMatrix DataOptions::load_matrix() const {
  return read_annotations_csv(annotations_path(), load_schema());
}

Dataset DataOptions::load_dataset() const {
  return annimpute::load_dataset(texts_path(), annotations_path(), load_schema());
}

bool DataOptions::has_texts() const {
  if (!texts.empty()) return true;
  return !data_dir.empty() && fs::exists(fs::path(data_dir) / "texts.txt");
}

RunDir::RunDir(const fs::path& base, std::string command) : command_(std::move(command)) {
  if (base.empty()) throw UsageError("--out is required");
  root_ = base;
  for (int k = 1; fs::exists(root_ / "manifest.json"); ++k) {
    root_ = fs::path(base.string() + "-" + std::to_string(k));
  }
  fs::create_directories(root_);
}

fs::path RunDir::file(const fs::path& relative) const {
  const fs::path p = root_ / relative;
  fs::create_directories(p.parent_path());
  return p;
}

void RunDir::add_input(const std::string& role, const fs::path& path) {
  inputs_[role] = sha256_file(path);
}

std::string RunDir::finish() {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), root_).generic_string();
    if (rel != "manifest.json") files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& rel : files) outputs[rel] = sha256_file(root_ / rel);

  nlohmann::json manifest = {{"format", "annimpute.manifest"},
                             {"version", 1},
                             {"command", command_},
                             {"config", config_},
                             {"seeds", seeds_},
                             {"inputs", inputs_},
                             {"outputs", outputs}};
  const std::string run_hash = sha256_hex(manifest.dump());
  manifest["run_hash"] = run_hash;
  write_json_file(root_ / "manifest.json", manifest);
  return run_hash;
}

void ImputeOptions::add(CLI::App* app) {
  app->add_option("--grid-preset", grid_preset, "Hyperparameter grid: full or small")
      ->check(CLI::IsMember({"full", "small"}))
      ->capture_default_str();
  app->add_option("--grid", grid_file, "JSON file {\"kernel\": [...], \"ncf\": [...]} of combos");
  app->add_option("--grid-seed", seed, "Seed of the kernel validation split")->capture_default_str();
  app->add_option("--validation-fraction", validation_fraction, "Kernel validation share")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--ncf-epochs", ncf_epochs, "Epochs for the NCF grid")->capture_default_str();
  app->add_option("--mt-epochs", mt_epochs, "Multitask epochs")->capture_default_str();
  app->add_option("--mt-lr", mt_learning_rate, "Multitask learning rate")->capture_default_str();
  app->add_option("--mt-seed", mt_seed, "Multitask item-order seed")->capture_default_str();
  app->add_option("--encoder-dim", encoder_dim, "Hashed text feature width")->capture_default_str();
  app->add_option("--embeddings", embeddings, "CSV of precomputed item vectors (item,v1,...)");
}

nlohmann::json ImputeOptions::to_json() const {
  nlohmann::json j = {{"grid_preset", grid_preset},
                      {"grid_seed", seed},
                      {"validation_fraction", validation_fraction},
                      {"ncf_epochs", ncf_epochs},
                      {"mt_epochs", mt_epochs},
                      {"mt_learning_rate", mt_learning_rate},
                      {"mt_seed", mt_seed},
                      {"encoder_dim", encoder_dim}};
  if (!grid_file.empty()) j["grid"] = read_json_file(grid_file);
  j["embeddings"] = !embeddings.empty();
  return j;
}

std::vector<KernelMFHyper> ImputeOptions::kernel_grid() const {
  if (!grid_file.empty()) {
    const auto j = read_json_file(grid_file);
    if (j.contains("kernel")) {
      std::vector<KernelMFHyper> grid;
      for (const auto& h : j.at("kernel")) grid.push_back(kernel_mf::hyper_from_json(h));
      return grid;
    }
  }
  if (grid_preset == "full") return kernel_mf::default_grid();
  std::vector<KernelMFHyper> grid;
  for (std::size_t factors : {2, 4}) {
    for (std::size_t epochs : {128, 256}) {
      for (Kernel kernel : {Kernel::Linear, Kernel::Rbf, Kernel::Sigmoid}) {
        KernelMFHyper h;
        h.factors = factors;
        h.epochs = epochs;
        h.kernel = kernel;
        grid.push_back(h);
      }
    }
  }
  return grid;
}

std::vector<NCFHyper> ImputeOptions::ncf_grid() const {
  if (!grid_file.empty()) {
    const auto j = read_json_file(grid_file);
    if (j.contains("ncf")) {
      std::vector<NCFHyper> grid;
      for (const auto& h : j.at("ncf")) grid.push_back(ncf::hyper_from_json(h));
      return grid;
    }
  }
  if (grid_preset == "full") return ncf::default_grid(ncf_epochs, 42);
  std::vector<NCFHyper> grid;
  for (std::size_t factors : {8, 16}) {
    NCFHyper h;
    h.factors = factors;
    h.epochs = ncf_epochs;
    h.learning_rate = 0.003;
    h.batch_size = 32;
    grid.push_back(h);
  }
  return grid;
}

MultitaskHyper ImputeOptions::multitask_hyper() const {
  MultitaskHyper h;
  h.epochs = mt_epochs;
  h.learning_rate = mt_learning_rate;
  h.seed = mt_seed;
  return h;
}

EncoderConfig ImputeOptions::encoder() const {
  EncoderConfig c;
  c.dim = encoder_dim;
  return c;
}

std::vector<std::string> parse_methods(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      if (name != "kernel" && name != "ncf" && name != "multitask") {
        throw UsageError("unknown method '" + name + "' (kernel, ncf, multitask)");
      }
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
  }
  if (out.empty()) throw UsageError("no imputation method given");
  return out;
}

RealGrid item_features(const ImputeOptions& options, const std::vector<std::string>& texts,
                       std::size_t n_items) {
  if (!options.embeddings.empty()) return multitask::load_embeddings(options.embeddings, n_items);
  if (texts.size() != n_items) throw DataError("multitask needs one text per item");
  return encode_all(TextEncoder(options.encoder()), texts);
}

MethodOutput run_method(const std::string& method, const AnnotationMatrix& train,
                        const RealGrid* features, const ImputeOptions& options) {
  MethodOutput out;
  if (method == "kernel") {
    const auto grid = options.kernel_grid();
    const auto result =
        kernel_mf::grid_search(train, grid, options.seed, options.validation_fraction);
    spdlog::info("kernel: best of {} combos, validation RMSE {:.4f}", grid.size(), result.score);
    const KernelMFModel model = kernel_mf::train(train, result.best);
    out.imputed = kernel_mf::impute(train, model);
    out.model = kernel_mf::model_to_json(model);
    out.selection = {{"best", kernel_mf::hyper_to_json(result.best)},
                     {"score", result.score},
                     {"criterion", "validation_rmse"},
                     {"scores", score_list(result.scores)}};
  } else if (method == "ncf") {
    const auto grid = options.ncf_grid();
    const auto result = ncf::grid_search(train, grid);
    spdlog::info("ncf: best of {} combos, training RMSE {:.4f}", grid.size(), result.score);
    const NCFModel model = ncf::train(train, result.best);
    out.imputed = ncf::impute(train, model);
    out.model = ncf::model_to_json(model);
    out.selection = {{"best", ncf::hyper_to_json(result.best)},
                     {"score", result.score},
                     {"criterion", "training_rmse"},
                     {"scores", score_list(result.scores)}};
  } else if (method == "multitask") {
    if (features == nullptr) throw UsageError("multitask needs item texts or --embeddings");
    const MultitaskModel model =
        multitask::train(*features, train, options.multitask_hyper(), options.encoder());
    out.imputed = multitask::impute(*features, train, model);
    out.model = multitask::model_to_json(model);
    out.selection = {{"best", multitask::hyper_to_json(model.hyper)}};
  } else {
    throw UsageError("unknown method '" + method + "'");
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += sep;
    out += parts[k];
  }
  return out;
}

}  // namespace annimpute::cli
