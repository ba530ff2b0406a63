#include "annimpute/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "annimpute/errors.hpp"
#include "annimpute/util/random.hpp"

namespace annimpute {

namespace {

constexpr std::array<const char*, 8> kOnWords{"bright", "loud", "formal", "kind",
                                             "quick", "sharp", "warm", "public"};
constexpr std::array<const char*, 8> kOffWords{"dim", "quiet", "casual", "rude",
                                              "slow", "blunt", "cold", "private"};
constexpr std::array<const char*, 12> kFiller{"the", "story", "about", "a", "neighbor", "with",
                                             "some", "remarks", "on", "work", "and", "weather"};

}  // namespace

SynthData make_synth(const SynthConfig& config) {
  config.schema.validate();
  const int range = config.schema.max_label - config.schema.min_label;
  if (config.rank == 0) throw UsageError("synth: rank must be >= 1");
  if (config.rank > static_cast<std::size_t>(range)) {
    throw UsageError("synth: rank must not exceed the label range");
  }
  if (!(config.observed > 0.0 && config.observed <= 1.0)) {
    throw UsageError("synth: observed fraction must be in (0, 1]");
  }
  if (config.noise < 0.0) throw UsageError("synth: noise must be >= 0");
  if (config.items == 0 || config.annotators == 0) throw UsageError("synth: empty shape");

  const std::size_t n = config.items;
  const std::size_t m = config.annotators;
  const std::size_t r = config.rank;
  const int top_level = range - static_cast<int>(r) + 1;
  Rng rng(config.seed);

  SynthData out;
  out.item_factors = LabelGrid(n, r);
  out.annotator_factors = LabelGrid(m, r);
  for (std::size_t i = 0; i < n; ++i) {
    out.item_factors(i, 0) = static_cast<int>(rng.below(static_cast<std::size_t>(top_level) + 1));
    for (std::size_t k = 1; k < r; ++k) out.item_factors(i, k) = static_cast<int>(rng.below(2));
  }
  for (std::size_t j = 0; j < m; ++j) {
    out.annotator_factors(j, 0) = 1;
    for (std::size_t k = 1; k < r; ++k) {
      out.annotator_factors(j, k) = static_cast<int>(rng.below(2));
    }
  }

  out.truth = LabelGrid(n, m);
  out.complete = LabelGrid(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      int t = config.schema.min_label;
      for (std::size_t k = 0; k < r; ++k) t += out.item_factors(i, k) * out.annotator_factors(j, k);
      out.truth(i, j) = t;
      double noisy = t;
      if (config.noise > 0.0) noisy += rng.normal(0.0, config.noise);
      const long rounded = std::lround(noisy);
      out.complete(i, j) = static_cast<int>(
          std::clamp<long>(rounded, config.schema.min_label, config.schema.max_label));
    }
  }

  Grid<std::uint8_t> mask(n, m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) mask(i, j) = rng.uniform() < config.observed ? 1 : 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = mask.row(i);
    if (std::none_of(row.begin(), row.end(), [](std::uint8_t b) { return b != 0; })) {
      mask(i, rng.below(m)) = 1;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < n && !any; ++i) any = mask(i, j) != 0;
    if (!any) mask(rng.below(n), j) = 1;
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (mask(i, j)) cells.push_back({i, j, out.complete(i, j)});
    }
  }
  out.dataset.matrix = AnnotationMatrix(n, m, config.schema, std::move(cells));

  out.dataset.texts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string text = "Item " + std::to_string(i) + ":";
    text += " tier" + std::to_string(out.item_factors(i, 0));
    for (std::size_t k = 1; k < r; ++k) {
      const auto w = (k - 1) % kOnWords.size();
      text += ' ';
      text += out.item_factors(i, k) ? kOnWords[w] : kOffWords[w];
      if (k > kOnWords.size()) text += std::to_string((k - 1) / kOnWords.size());
    }
    for (int f = 0; f < 3; ++f) {
      text += ' ';
      text += kFiller[rng.below(kFiller.size())];
    }
    text += '.';
    out.dataset.texts.push_back(std::move(text));
  }
  return out;
}

}  // namespace annimpute
