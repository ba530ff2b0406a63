#pragma once

#include <cstdint>

#include "annimpute/core/dataset.hpp"

namespace annimpute {

struct SynthConfig {
  std::size_t items = 50;
  std::size_t annotators = 20;
  std::size_t rank = 2;
  LabelSchema schema{0, 4, {}, 1};
  double observed = 0.4;  // per-cell observation probability
  double noise = 0.0;     // std of Gaussian label noise
  std::uint64_t seed = 42;
};

struct SynthData {
  Dataset dataset;
  LabelGrid truth;       // exact low-rank complete matrix
  LabelGrid complete;    // truth plus rounded noise; observed cells come from here
  LabelGrid item_factors;       // items x rank: level, then binary traits
  LabelGrid annotator_factors;  // annotators x rank: 1, then binary sensitivities
};

// truth = min_label + U V^T where U_i = (level_i, traits_i) and
// V_j = (1, sensitivities_j). Levels lie in [0, range - rank + 1], traits and
// sensitivities in {0, 1}, so every entry stays in the schema and annotators
// differ from the item level by at most rank - 1. The rank of
// truth - min_label is at most `rank`.
// Every item and every annotator gets at least one observed cell. Item texts
// carry one token per latent factor so text models have signal.
// Throws UsageError for rank 0, rank > label range or observed outside (0,1].
SynthData make_synth(const SynthConfig& config);

}  // namespace annimpute
