#include "annimpute/analysis/records.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "annimpute/core/dataset.hpp"
#include "annimpute/errors.hpp"
#include "annimpute/util/json_io.hpp"

namespace annimpute::analysis {

nlohmann::json real_to_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto text = j.get<std::string>();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw DataError("expected a number, got '" + text + "'");
}

nlohmann::json record_to_json(const SoftLabelRecord& record) {
  nlohmann::json imputed = nlohmann::json::object();
  nlohmann::json kl = nlohmann::json::object();
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& [method, dist] : record.imputed_by_method) {
    imputed[method] = dist;
    methods.push_back(method);
  }
  for (const auto& [method, value] : record.kl_by_method) kl[method] = real_to_json(value);
  return {{"item", record.item},         {"original", record.original},
          {"methods", methods},          {"imputed", imputed},
          {"kl", kl},                    {"best_method", record.best_method}};
}

SoftLabelRecord record_from_json(const nlohmann::json& j) {
  SoftLabelRecord r;
  try {
    r.item = j.at("item").get<std::size_t>();
    r.original = j.at("original").get<std::vector<double>>();
    for (const auto& m : j.at("methods")) {
      const auto method = m.get<std::string>();
      r.imputed_by_method.emplace_back(method, j.at("imputed").at(method).get<std::vector<double>>());
      r.kl_by_method.emplace_back(method, real_from_json(j.at("kl").at(method)));
    }
    r.best_method = j.at("best_method").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("soft-label record: ") + e.what());
  }
  return r;
}

nlohmann::json aggregate_to_json(const std::vector<MethodAggregate>& aggregate) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : aggregate) {
    out.push_back({{"method", a.method}, {"mean", real_to_json(a.mean)}, {"std", real_to_json(a.std)}});
  }
  return out;
}

std::vector<nlohmann::json> delta_records(const DistributionDelta& delta) {
  std::vector<nlohmann::json> out;
  out.reserve(delta.per_item.size());
  for (std::size_t i = 0; i < delta.per_item.size(); ++i) {
    const ItemDelta& d = delta.per_item[i];
    out.push_back({{"item", i},
                   {"variance_before", d.variance_before},
                   {"variance_after", d.variance_after},
                   {"disagreement_before", d.disagreement_before},
                   {"disagreement_after", d.disagreement_after}});
  }
  return out;
}

nlohmann::json delta_summary(const DistributionDelta& delta) {
  return {{"items", delta.per_item.size()},
          {"avg_variance_change", delta.avg_variance_change},
          {"avg_disagreement_change", delta.avg_disagreement_change}};
}

void write_softlabel_records(const std::filesystem::path& path, const SoftLabelReport& report) {
  std::vector<nlohmann::json> lines;
  lines.reserve(report.records.size());
  for (const auto& r : report.records) lines.push_back(record_to_json(r));
  write_ndjson(path, lines);
}

std::vector<SoftLabelRecord> read_softlabel_records(const std::filesystem::path& path) {
  std::vector<SoftLabelRecord> out;
  for (const auto& j : read_ndjson(path)) out.push_back(record_from_json(j));
  return out;
}

void write_delta_records(const std::filesystem::path& path, const DistributionDelta& delta) {
  write_ndjson(path, delta_records(delta));
}

void write_pca_csv(const std::filesystem::path& path, const PCAProjection& pca) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "item,x,y\n";
  for (std::size_t i = 0; i < pca.coordinates.rows(); ++i) {
    out << i << ',' << format_real(pca.coordinates(i, 0)) << ',' << format_real(pca.coordinates(i, 1))
        << '\n';
  }
}

}  // namespace annimpute::analysis
