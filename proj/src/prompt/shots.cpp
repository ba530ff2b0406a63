#include "annimpute/prompt/shots.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "annimpute/errors.hpp"
#include "annimpute/util/random.hpp"

namespace annimpute::prompt {

std::vector<Shot> ShotSet::shots() const {
  std::vector<Shot> out;
  if (uses_imputed()) out.insert(out.end(), imputed.begin(), imputed.end());
  if (uses_original()) out.insert(out.end(), original.begin(), original.end());
  return out;
}

std::vector<std::size_t> select_low_response_annotators(const AnnotationMatrix& matrix,
                                                        std::size_t n) {
  if (n > matrix.n_annotators()) {
    throw UsageError("asked for " + std::to_string(n) + " annotators but the matrix has " +
                     std::to_string(matrix.n_annotators()));
  }
  const auto counts = matrix.annotator_counts();
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });
  order.resize(n);
  return order;
}

ShotSet assemble_shots(std::size_t annotator, const Dataset& dataset, const LabelGrid* imputed,
                       Condition condition, std::uint64_t seed, ShotLimits limits) {
  const AnnotationMatrix& matrix = dataset.matrix;
  if (annotator >= matrix.n_annotators()) throw DataError("annotator index out of range");
  if (dataset.texts.size() != matrix.n_items()) throw DataError("texts and matrix disagree");

  std::vector<Shot> labelled;
  std::vector<std::size_t> unlabelled;
  for (std::size_t i = 0; i < matrix.n_items(); ++i) {
    if (auto label = matrix.at(i, annotator)) {
      labelled.push_back({i, dataset.texts[i], *label});
    } else {
      unlabelled.push_back(i);
    }
  }
  if (labelled.empty()) {
    throw DataError("annotator " + std::to_string(annotator) + " has no annotations");
  }

  Rng rng(seed);
  rng.shuffle(std::span<Shot>(labelled));

  ShotSet set;
  set.annotator = annotator;
  set.condition = condition;
  set.held_out = labelled.front();
  for (std::size_t k = 1; k < labelled.size() && set.original.size() < limits.max_original; ++k) {
    // A duplicate of the target text would leak its label.
    if (labelled[k].text != set.held_out.text) set.original.push_back(labelled[k]);
  }

  if (set.uses_imputed()) {
    if (imputed == nullptr) {
      throw UsageError("condition " + std::string(to_string(condition)) + " needs imputed data");
    }
    if (imputed->rows() != matrix.n_items() || imputed->cols() != matrix.n_annotators()) {
      throw DataError("imputed matrix shape does not match the dataset");
    }
    std::set<std::string> taken{set.held_out.text};
    for (const Shot& s : set.original) taken.insert(s.text);
    rng.shuffle(std::span<std::size_t>(unlabelled));
    for (std::size_t i : unlabelled) {
      if (set.imputed.size() >= limits.max_imputed) break;
      if (!taken.insert(dataset.texts[i]).second) continue;
      set.imputed.push_back({i, dataset.texts[i], (*imputed)(i, annotator)});
    }
  }
  return set;
}

}  // namespace annimpute::prompt
