#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "annimpute/errors.hpp"
#include "annimpute/levels.hpp"
#include "annimpute/metrics.hpp"
#include "annimpute/splits.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace annimpute;

TEST_CASE("weighted f1 hand case") {
  std::vector<int> t{0, 0, 1}, p{0, 1, 1};
  CHECK(weighted_f1(p, t) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(weighted_f1(t, t) == 1.0);
  CHECK_THROWS_AS(weighted_f1(std::vector<int>{}, std::vector<int>{}), UsageError);
  CHECK_THROWS_AS(weighted_f1(std::vector<int>{1}, std::vector<int>{1, 2}), UsageError);
}

TEST_CASE("weighted f1 matches the confusion-matrix oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    const std::size_t k = 1 + rng.below(5);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.below(k));
      p[i] = rng.below(10) == 0 ? -7 : static_cast<int>(rng.below(k));
    }
    CHECK(weighted_f1(p, t) == oracle::weighted_f1(p, t));
  }
}

TEST_CASE("weighted f1 with schema rejects labels outside it") {
  auto s = testutil::schema(0, 2);
  CHECK_THROWS_AS(weighted_f1(std::vector<int>{3}, std::vector<int>{1}, s), DataError);
  CHECK(weighted_f1(std::vector<int>{1}, std::vector<int>{1}, s) == 1.0);
}

TEST_CASE("rmse") {
  std::vector<double> a{1, 2, 3}, b{1, 2, 5};
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(4.0 / 3.0)));
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), UsageError);
}

TEST_CASE("disagreement levels hand case") {
  std::vector<double> rates{0, 0, 0.5, 0.5, 1, 1};
  auto lv = assign_disagreement_levels(rates);
  CHECK(lv.low_threshold == 0.0);
  CHECK(lv.high_threshold == 1.0);
  CHECK(lv.counts() == std::array<std::size_t, 3>{2, 2, 2});
  CHECK_THROWS_AS(assign_disagreement_levels(std::vector<double>{0, 0, 1}), DataError);
}

TEST_CASE("disagreement levels match exhaustive threshold search") {
  Rng rng(77);
  int checked = 0;
  while (checked < 100) {
    const std::size_t n = 3 + rng.below(28);
    std::vector<double> rates(n);
    for (double& r : rates) r = static_cast<double>(rng.below(7)) / 6.0;
    std::set<double> distinct(rates.begin(), rates.end());
    if (distinct.size() < 3) continue;
    ++checked;
    auto expect = oracle::best_levels(rates);
    auto got = assign_disagreement_levels(rates);
    CHECK(got.low_threshold == expect.first);
    CHECK(got.high_threshold == expect.second);
    for (std::size_t i = 0; i < n; ++i) {
      auto want = rates[i] <= expect.first    ? DisagreementLevel::Low
                  : rates[i] >= expect.second ? DisagreementLevel::High
                                              : DisagreementLevel::Medium;
      CHECK(got.level_of_item[i] == want);
    }
  }
}

TEST_CASE("holdout spreads cells and never empties a row") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = testutil::random_matrix(rng, 12, 8, testutil::schema(0, 4), 0.5);
    auto split = make_holdout(m, 0.2, 100 + trial);
    const auto target = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(m.size())));
    CHECK(split.heldout_cells.size() == target);
    CHECK(split.train.size() + split.heldout_cells.size() == m.size());
    for (std::size_t i = 0; i < m.n_items(); ++i) CHECK_FALSE(split.train.row(i).empty());
    for (const Cell& c : split.heldout_cells) {
      CHECK(m.at(c.item, c.annotator) == c.label);
      CHECK_FALSE(split.train.has(c.item, c.annotator));
    }
    auto again = make_holdout(m, 0.2, 100 + trial);
    CHECK(again.heldout_cells == split.heldout_cells);
  }
  auto m = testutil::random_matrix(rng, 4, 4, testutil::schema(0, 1), 0.5);
  CHECK_THROWS_AS(make_holdout(m, 0.0, 1), UsageError);
  CHECK_THROWS_AS(make_holdout(m, 1.0, 1), UsageError);
  AnnotationMatrix single(2, 2, testutil::schema(0, 1), {{0, 0, 1}, {1, 1, 0}});
  CHECK_THROWS_AS(make_holdout(single, 0.5, 1), DataError);
}

TEST_CASE("k folds partition the items") {
  auto folds = make_kfolds(23, 5, 9);
  std::vector<std::size_t> sizes(5, 0);
  for (std::size_t f : folds.fold_of_item) ++sizes[f];
  for (std::size_t s : sizes) CHECK((s == 4 || s == 5));
  for (std::size_t f = 0; f < 5; ++f) {
    auto in = folds.items_in(f);
    auto out = folds.items_not_in(f);
    CHECK(in.size() + out.size() == 23);
  }
  CHECK(make_kfolds(23, 5, 9).fold_of_item == folds.fold_of_item);
  CHECK(fold_records(folds).size() == 23);
}
