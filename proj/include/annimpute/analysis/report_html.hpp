#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "annimpute/analysis/distribution.hpp"
#include "annimpute/analysis/pca.hpp"
#include "annimpute/analysis/softlabel.hpp"
#include "annimpute/core/schema.hpp"

namespace annimpute::analysis {

struct ReportData {
  std::string title = "Imputation report";
  LabelSchema schema;
  std::vector<std::string> texts;  // optional, indexed by item
  std::vector<SoftLabelRecord> records;
  std::vector<MethodAggregate> aggregate;
  // One entry per method; before = original rows, after = imputed rows.
  std::vector<std::pair<std::string, DistributionDelta>> deltas;
  std::vector<std::pair<std::string, PCAProjection>> pca_panels;
};

// Bar segment widths in basis points: proportional, summing to exactly
// 10000 (largest-remainder rounding, ties to the lower label).
std::vector<int> bar_widths_bp(const std::vector<double>& proportions);

// Label colour, fixed per label index and label count.
std::string label_color(std::size_t index, std::size_t num_labels);

// Self-contained page: no scripts, stylesheets or images from elsewhere.
std::string render_report_html(const ReportData& data);

}  // namespace annimpute::analysis
