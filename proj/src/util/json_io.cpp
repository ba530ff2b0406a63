#include "annimpute/util/json_io.hpp"

#include <fstream>
#include <string>

#include "annimpute/errors.hpp"

namespace annimpute {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<nlohmann::json> read_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<nlohmann::json> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_ndjson(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& record : records) out << record.dump() << '\n';
}

nlohmann::json grid_to_json(const RealGrid& grid) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    auto row = grid.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"rows", grid.rows()}, {"cols", grid.cols()}, {"data", rows}};
}

RealGrid grid_from_json(const nlohmann::json& j) {
  try {
    RealGrid grid(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto& data = j.at("data");
    if (data.size() != grid.rows()) throw DataError("grid row count mismatch");
    for (std::size_t r = 0; r < grid.rows(); ++r) {
      auto values = data[r].get<std::vector<double>>();
      if (values.size() != grid.cols()) throw DataError("grid column count mismatch");
      std::copy(values.begin(), values.end(), grid.row(r).begin());
    }
    return grid;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("grid: ") + e.what());
  }
}

void require_format(const nlohmann::json& j, std::string_view format, int version) {
  if (!j.is_object() || j.value("format", std::string{}) != format) {
    throw DataError("not a " + std::string(format) + " file");
  }
  if (j.value("version", 0) != version) {
    throw DataError(std::string(format) + ": unsupported version " +
                    std::to_string(j.value("version", 0)));
  }
}

}  // namespace annimpute
