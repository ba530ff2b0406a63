#include "annimpute/core/schema.hpp"

#include <fstream>

#include "annimpute/errors.hpp"

namespace annimpute {

std::string LabelSchema::display(int label) const {
  if (scale == 1 || label % scale == 0) return std::to_string(label / scale);
  // Non-integral display values are rendered with the shortest exact decimal.
  std::string text = std::to_string(static_cast<double>(label) / scale);
  while (!text.empty() && text.back() == '0') text.pop_back();
  if (!text.empty() && text.back() == '.') text.pop_back();
  return text;
}

void LabelSchema::validate() const {
  if (min_label >= max_label) {
    throw DataError("schema: min_label must be < max_label");
  }
  if (!label_names.empty() &&
      label_names.size() != static_cast<std::size_t>(num_labels())) {
    throw DataError("schema: label_names must have one entry per label");
  }
  if (scale < 1) throw DataError("schema: scale must be >= 1");
}

LabelSchema schema_from_json(const nlohmann::json& j) {
  LabelSchema schema;
  try {
    schema.min_label = j.at("min_label").get<int>();
    schema.max_label = j.at("max_label").get<int>();
    if (j.contains("label_names")) {
      schema.label_names = j.at("label_names").get<std::vector<std::string>>();
    }
    if (j.contains("scale")) schema.scale = j.at("scale").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  schema.validate();
  return schema;
}

nlohmann::json schema_to_json(const LabelSchema& schema) {
  nlohmann::json j{{"min_label", schema.min_label}, {"max_label", schema.max_label}};
  if (!schema.label_names.empty()) j["label_names"] = schema.label_names;
  if (schema.scale != 1) j["scale"] = schema.scale;
  return j;
}

LabelSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema file " + path.string() + ": " + e.what());
  }
  return schema_from_json(j);
}

void save_schema(const std::filesystem::path& path, const LabelSchema& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << schema_to_json(schema).dump(2) << '\n';
}

}  // namespace annimpute
