#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "annimpute/core/grid.hpp"

namespace annimpute {

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// One compact JSON object per line.
std::vector<nlohmann::json> read_ndjson(const std::filesystem::path& path);
void write_ndjson(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

nlohmann::json grid_to_json(const RealGrid& grid);
RealGrid grid_from_json(const nlohmann::json& j);

// Checks the {"format", "version"} envelope of a model file.
void require_format(const nlohmann::json& j, std::string_view format, int version);

}  // namespace annimpute
