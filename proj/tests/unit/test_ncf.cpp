#include <doctest.h>

#include <cmath>

#include "annimpute/errors.hpp"
#include "annimpute/ncf.hpp"
#include "gradcheck.hpp"
#include "helpers.hpp"

using namespace annimpute;

namespace {

double train_rmse(const NCFModel& model, const AnnotationMatrix& m) {
  double s = 0.0;
  for (const Cell& c : m.cells()) {
    const double d = ncf::predict(model, c.item, c.annotator) - c.label;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(m.size()));
}

AnnotationMatrix twenty_cells() {
  Rng rng(20);
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      if ((i + 2 * j) % 5 != 0) cells.push_back({i, j, static_cast<int>(rng.below(5))});
  return AnnotationMatrix(5, 5, testutil::schema(0, 4), std::move(cells));
}

}  // namespace

TEST_CASE("ncf layout") {
  auto l = NCFLayout::make(5, 3, 8);
  CHECK(l.input() == 16);
  CHECK(l.hidden2() == 4);
  CHECK(l.total == 5 * 8 + 3 * 8 + 16 * 8 + 8 + 8 * 4 + 4 + 4 + 1);
}

TEST_CASE("zero network predicts the middle of the range") {
  auto model = ncf::init_model(3, 3, testutil::schema(0, 4), NCFHyper{});
  std::fill(model.params.begin(), model.params.end(), 0.0);
  CHECK(ncf::predict(model, 1, 2) == 2.0);
  CHECK_THROWS_AS(ncf::predict(model, 3, 0), DataError);
}

TEST_CASE("predictions stay in range under fuzzed parameters") {
  Rng rng(4);
  auto model = ncf::init_model(4, 4, testutil::schema(-2, 3), NCFHyper{});
  for (int trial = 0; trial < 50; ++trial) {
    for (double& p : model.params) p = rng.normal(0.0, 10.0);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const double y = ncf::predict(model, i, j);
        CHECK(y >= -2.0);
        CHECK(y <= 3.0);
      }
  }
}

TEST_CASE("annotator embedding locality") {
  auto model = ncf::init_model(3, 3, testutil::schema(0, 4), NCFHyper{});
  const double before = ncf::predict(model, 0, 0);
  for (double& v : model.annotator_embedding(2)) v += 1.0;
  CHECK(ncf::predict(model, 0, 0) == before);
}

TEST_CASE("ncf gradients match central differences per tensor") {
  Rng rng(31);
  auto s = testutil::schema(0, 4);
  for (int point = 0; point < 20; ++point) {
    NCFHyper hyper;
    hyper.factors = 4;
    auto model = ncf::init_model(4, 3, s, hyper);
    for (double& p : model.params) p = rng.normal(0.0, 0.5);
    std::vector<Cell> cells;
    for (int k = 0; k < 6; ++k) cells.push_back({rng.below(4), rng.below(3), static_cast<int>(rng.below(5))});
    std::vector<double> grad(model.params.size());
    ncf::batch_gradient(model, cells, grad);
    auto objective = [&](NCFModel& mm) { return ncf::batch_loss(mm, cells); };
    const auto& l = model.layout;
    const std::size_t bounds[] = {l.item_embeddings, l.annotator_embeddings, l.w1, l.b1, l.w2,
                                  l.b2, l.w3, l.b3, l.total};
    for (std::size_t t = 0; t + 1 < std::size(bounds); ++t) {
      std::vector<double> analytic, numeric;
      for (std::size_t k = bounds[t]; k < bounds[t + 1]; ++k) {
        analytic.push_back(grad[k]);
        numeric.push_back(gradcheck::central(model, model.params[k], objective, 1e-4));
      }
      CHECK(gradcheck::relative_error(analytic, numeric) < 1e-3);
    }
  }
}

// With 20 cells every epoch is a single Adam step, so at lr 0.001 the net
// needs a few thousand epochs to leave its near-constant start.
TEST_CASE("ncf memorises twenty cells") {
  auto m = twenty_cells();
  CHECK(m.size() == 20);
  NCFHyper hyper;
  hyper.factors = 8;
  hyper.learning_rate = 0.001;
  hyper.epochs = 5000;
  auto model = ncf::train(m, hyper);
  CHECK(train_rmse(model, m) < 0.05);
}

TEST_CASE("ncf training is deterministic and rejects odd factors") {
  auto m = twenty_cells();
  NCFHyper hyper;
  hyper.epochs = 5;
  auto a = ncf::train(m, hyper);
  auto b = ncf::train(m, hyper);
  CHECK(a.params == b.params);
  hyper.factors = 7;
  CHECK_THROWS(ncf::train(m, hyper));
  hyper.factors = 8;
  hyper.epochs = 0;
  auto untrained = ncf::train(m, hyper);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(ncf::predict(untrained, i, j) >= 0.0);
      CHECK(ncf::predict(untrained, i, j) <= 4.0);
    }
}

TEST_CASE("ncf grid search selects by training rmse") {
  auto m = twenty_cells();
  NCFHyper longer;
  longer.epochs = 500;
  longer.learning_rate = 0.001;
  NCFHyper shorter = longer;
  shorter.epochs = 1;
  std::vector<NCFHyper> grid{shorter, longer};
  auto r = ncf::grid_search(m, grid);
  CHECK(r.best.epochs == 500);
  CHECK(ncf::grid_search(m, grid).score == r.score);
  std::vector<NCFHyper> one{shorter};
  CHECK(ncf::grid_search(m, one).best.epochs == 1);
  CHECK(ncf::default_grid().size() == 24);
}

TEST_CASE("ncf imputation contract") {
  auto s = testutil::schema(0, 4);
  CHECK(to_label(3.5, s) == 4);
  LabelGrid g(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) g(i, j) = static_cast<int>((i + j) % 5);
  auto full = AnnotationMatrix::from_grid(g, s);
  NCFHyper hyper;
  hyper.epochs = 3;
  auto model = ncf::train(full, hyper);
  auto out = ncf::impute(full, model);
  CHECK(out.full_int == g);

  auto m = twenty_cells();
  auto sparse = ncf::impute(m, ncf::train(m, hyper));
  for (const Cell& c : m.cells()) CHECK(sparse.full_int(c.item, c.annotator) == c.label);
  auto back = ncf::model_from_json(ncf::model_to_json(model));
  CHECK(back.params == model.params);
}
