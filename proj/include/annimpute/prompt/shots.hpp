#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "annimpute/core/dataset.hpp"
#include "annimpute/prompt/skeleton.hpp"

namespace annimpute::prompt {

struct Shot {
  std::size_t item = 0;
  std::string text;
  int label = 0;
};

// Original and imputed blocks are kept apart so a prompt's provenance is
// visible; `condition` decides which of them a prompt uses.
struct ShotSet {
  std::size_t annotator = 0;
  Condition condition = Condition::OriginalOnly;
  std::vector<Shot> original;
  std::vector<Shot> imputed;
  Shot held_out;

  [[nodiscard]] bool uses_original() const { return condition != Condition::ImputedOnly; }
  [[nodiscard]] bool uses_imputed() const { return condition != Condition::OriginalOnly; }
  // Shots in prompt order: imputed block first, then original.
  [[nodiscard]] std::vector<Shot> shots() const;
};

struct ShotLimits {
  std::size_t max_original = 30;
  std::size_t max_imputed = 30;
};

// The n annotators with the fewest annotations, ties to the smaller index.
std::vector<std::size_t> select_low_response_annotators(const AnnotationMatrix& matrix,
                                                        std::size_t n = 30);

// Seeded: one of the annotator's labelled items is held out; up to
// max_original of the rest become original shots; imputed shots come from
// items the annotator did not label, with texts distinct from every original
// shot, the target and each other. `imputed` may be null for original_only.
ShotSet assemble_shots(std::size_t annotator, const Dataset& dataset, const LabelGrid* imputed,
                       Condition condition, std::uint64_t seed, ShotLimits limits = {});

}  // namespace annimpute::prompt
