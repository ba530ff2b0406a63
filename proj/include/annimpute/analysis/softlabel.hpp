#pragma once

#include <string>
#include <utility>
#include <vector>

#include "annimpute/analysis/distribution.hpp"
#include "annimpute/core/grid.hpp"
#include "annimpute/core/matrix.hpp"

namespace annimpute::analysis {

using MethodGrids = std::vector<std::pair<std::string, LabelGrid>>;

struct SoftLabelRecord {
  std::size_t item = 0;
  std::vector<double> original;
  std::vector<std::pair<std::string, std::vector<double>>> imputed_by_method;
  std::vector<std::pair<std::string, double>> kl_by_method;
  std::string best_method;  // lowest divergence; earliest method on ties
};

struct MethodAggregate {
  std::string method;
  double mean = 0.0;
  double std = 0.0;  // population
};

struct SoftLabelOptions {
  double alpha = 1e-6;
  Divergence kind = Divergence::KL;
};

struct SoftLabelReport {
  std::vector<SoftLabelRecord> records;
  std::vector<MethodAggregate> aggregate;  // method order as given
};

// Per item and method, the divergence between the observed soft label and
// the imputed row's soft label. Throws DataError on shape mismatch.
SoftLabelReport softlabel_report(const AnnotationMatrix& original, const MethodGrids& imputed_sets,
                                 const SoftLabelOptions& options = {});

}  // namespace annimpute::analysis
