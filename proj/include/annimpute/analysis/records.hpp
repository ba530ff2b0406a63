#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "annimpute/analysis/distribution.hpp"
#include "annimpute/analysis/pca.hpp"
#include "annimpute/analysis/softlabel.hpp"

namespace annimpute::analysis {

// Finite values stay numbers; infinities and NaN become "inf", "-inf", "nan".
nlohmann::json real_to_json(double value);
double real_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const SoftLabelRecord& record);
SoftLabelRecord record_from_json(const nlohmann::json& j);
nlohmann::json aggregate_to_json(const std::vector<MethodAggregate>& aggregate);

std::vector<nlohmann::json> delta_records(const DistributionDelta& delta);
nlohmann::json delta_summary(const DistributionDelta& delta);

void write_softlabel_records(const std::filesystem::path& path, const SoftLabelReport& report);
std::vector<SoftLabelRecord> read_softlabel_records(const std::filesystem::path& path);
void write_delta_records(const std::filesystem::path& path, const DistributionDelta& delta);

// "item,x,y" rows.
void write_pca_csv(const std::filesystem::path& path, const PCAProjection& pca);

}  // namespace annimpute::analysis
