#include <doctest.h>

#include <cmath>

#include "annimpute/errors.hpp"
#include "annimpute/kernel_mf.hpp"
#include "annimpute/splits.hpp"
#include "gradcheck.hpp"
#include "helpers.hpp"

using namespace annimpute;

namespace {

KernelMFModel random_model(Rng& rng, Kernel kernel, std::size_t n, std::size_t m, std::size_t f) {
  KernelMFModel model;
  model.hyper.kernel = kernel;
  model.hyper.factors = f;
  model.hyper.regularization = 0.01;
  model.schema = testutil::schema(0, 4);
  model.item_factors = RealGrid(n, f);
  model.annotator_factors = RealGrid(m, f);
  for (double& v : model.item_factors.values()) v = rng.normal(0.0, 0.7);
  for (double& v : model.annotator_factors.values()) v = rng.normal(0.0, 0.7);
  if (kernel == Kernel::Linear) {
    model.bias = rng.normal(2.0, 0.5);
    model.scale = rng.normal(1.0, 0.3);
  } else {
    model.bias = 0.0;
    model.scale = 4.0;
  }
  return model;
}

// Integer matrix round(clamp(W0 H0^T)) with W0, H0 chosen so the product is
// already integral and inside 0..4.
LabelGrid rank2_grid() {
  const int w[4][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 1}};
  const int h[4][2] = {{1, 1}, {2, 0}, {0, 2}, {1, 2}};
  LabelGrid g(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = std::clamp(w[i][0] * h[j][0] + w[i][1] * h[j][1], 0, 4);
  return g;
}

double train_rmse(const KernelMFModel& model, const AnnotationMatrix& m) {
  double s = 0.0;
  for (const Cell& c : m.cells()) {
    const double d = kernel_mf::predict(model, c.item, c.annotator) - c.label;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(m.size()));
}

}  // namespace

TEST_CASE("kernel values") {
  std::vector<double> w{1, 0}, h{1, 0}, z{0, 1};
  CHECK(kernel_mf::kernel_value(Kernel::Linear, 0.5, w, h) == 1.0);
  CHECK(kernel_mf::kernel_value(Kernel::Rbf, 0.5, w, h) == 1.0);
  CHECK(kernel_mf::kernel_value(Kernel::Sigmoid, 0.5, w, z) == 0.5);
  CHECK(kernel_mf::kernel_value(Kernel::Rbf, 0.5, w, z) == doctest::Approx(std::exp(-1.0)));
  CHECK(kernel_from_string("rbf") == Kernel::Rbf);
  CHECK_THROWS(kernel_from_string("poly"));
  KernelMFHyper hyper;
  hyper.factors = 4;
  CHECK(hyper.effective_gamma() == 0.25);
}

TEST_CASE("predict on hand-set models") {
  auto s = testutil::schema(0, 4);
  AnnotationMatrix m(1, 1, s, {{0, 0, 2}});
  for (Kernel k : {Kernel::Linear, Kernel::Rbf, Kernel::Sigmoid}) {
    KernelMFHyper hyper;
    hyper.kernel = k;
    auto model = kernel_mf::init_model(m, hyper);
    model.item_factors(0, 0) = 1.0;
    model.item_factors(0, 1) = 0.0;
    model.annotator_factors(0, 0) = 1.0;
    model.annotator_factors(0, 1) = 0.0;
    if (k == Kernel::Linear) {
      model.bias = 0.0;
      model.scale = 1.0;
      CHECK(kernel_mf::predict(model, 0, 0) == 1.0);
    } else if (k == Kernel::Rbf) {
      CHECK(kernel_mf::predict(model, 0, 0) == 4.0);
    } else {
      model.annotator_factors(0, 0) = 0.0;
      CHECK(kernel_mf::predict(model, 0, 0) == 2.0);
    }
    CHECK_THROWS_AS(kernel_mf::predict(model, 1, 0), DataError);
  }
}

TEST_CASE("zero init std gives the bias everywhere") {
  Rng rng(1);
  auto m = testutil::random_matrix(rng, 5, 4, testutil::schema(0, 4), 0.5);
  KernelMFHyper hyper;
  hyper.init_std = 0.0;
  auto model = kernel_mf::init_model(m, hyper);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(kernel_mf::predict(model, i, j) == model.bias);
}

TEST_CASE("kernel mf gradients match central differences") {
  Rng rng(11);
  for (Kernel kernel : {Kernel::Linear, Kernel::Rbf, Kernel::Sigmoid}) {
    for (int point = 0; point < 20; ++point) {
      auto model = random_model(rng, kernel, 3, 4, 3);
      Cell cell{rng.below(3), rng.below(4), static_cast<int>(rng.below(5))};
      auto g = kernel_mf::cell_gradient(model, cell);
      auto objective = [&](KernelMFModel& mm) { return kernel_mf::cell_objective(mm, cell); };
      std::vector<double> analytic, numeric;
      for (std::size_t k = 0; k < 3; ++k) {
        analytic.push_back(g.item[k]);
        numeric.push_back(gradcheck::central(model, model.item_factors(cell.item, k), objective));
      }
      for (std::size_t k = 0; k < 3; ++k) {
        analytic.push_back(g.annotator[k]);
        numeric.push_back(
            gradcheck::central(model, model.annotator_factors(cell.annotator, k), objective));
      }
      if (kernel == Kernel::Linear) {
        analytic.push_back(g.bias);
        numeric.push_back(gradcheck::central(model, model.bias, objective));
        analytic.push_back(g.scale);
        numeric.push_back(gradcheck::central(model, model.scale, objective));
      } else {
        CHECK(g.bias == 0.0);
        CHECK(g.scale == 0.0);
      }
      CHECK(gradcheck::relative_error(analytic, numeric) < 1e-4);
    }
  }
}

TEST_CASE("rank-2 toy is fitted") {
  auto m = AnnotationMatrix::from_grid(rank2_grid(), testutil::schema(0, 4));
  KernelMFHyper hyper;
  hyper.factors = 2;
  hyper.epochs = 256;
  auto model = kernel_mf::train(m, hyper);
  CHECK(train_rmse(model, m) < 0.15);
  CHECK(model.epoch_rmse.size() == 256);
}

TEST_CASE("training is deterministic") {
  Rng rng(3);
  auto m = testutil::random_matrix(rng, 8, 6, testutil::schema(0, 4), 0.5);
  KernelMFHyper hyper;
  hyper.kernel = Kernel::Rbf;
  hyper.epochs = 16;
  auto a = kernel_mf::train(m, hyper);
  auto b = kernel_mf::train(m, hyper);
  CHECK(a.item_factors == b.item_factors);
  CHECK(a.annotator_factors == b.annotator_factors);
}

TEST_CASE("training loss is near-monotone at a small learning rate") {
  // Well-conditioned rank-1 data.
  LabelGrid g(10, 8);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 8; ++j) g(i, j) = static_cast<int>((i % 3) + (j % 2));
  auto m = AnnotationMatrix::from_grid(g, testutil::schema(0, 4));
  KernelMFHyper hyper;
  hyper.learning_rate = 1e-4;
  hyper.epochs = 64;
  auto model = kernel_mf::train(m, hyper);
  int rises = 0;
  for (std::size_t e = 1; e < model.epoch_rmse.size(); ++e)
    if (model.epoch_rmse[e] > model.epoch_rmse[e - 1]) ++rises;
  CHECK(rises <= 2);
}

TEST_CASE("rank recovery on exact low-rank data") {
  LabelGrid g(30, 12);
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = 0; j < 12; ++j)
      g(i, j) = static_cast<int>(i % 3) + static_cast<int>((i / 3) % 2) * static_cast<int>(j % 2);
  auto full = AnnotationMatrix::from_grid(g, testutil::schema(0, 4));
  auto split = make_holdout(full, 0.1, 4);
  KernelMFHyper hyper;
  hyper.factors = 2;
  hyper.epochs = 256;
  auto model = kernel_mf::train(split.train, hyper);
  double s = 0.0;
  for (const Cell& c : split.heldout_cells) {
    const double d = kernel_mf::predict(model, c.item, c.annotator) - c.label;
    s += d * d;
  }
  CHECK(std::sqrt(s / static_cast<double>(split.heldout_cells.size())) < 0.2);
}

TEST_CASE("grid search prefers the healthy combo and is deterministic") {
  auto m = AnnotationMatrix::from_grid(rank2_grid(), testutil::schema(0, 4));
  LabelGrid big(20, 10);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 10; ++j) big(i, j) = static_cast<int>(i % 3) + static_cast<int>(j % 2);
  auto data = AnnotationMatrix::from_grid(big, testutil::schema(0, 4));
  KernelMFHyper bad;
  bad.epochs = 1;
  bad.learning_rate = 1e-9;
  KernelMFHyper good;
  good.epochs = 128;
  std::vector<KernelMFHyper> grid{bad, good};
  auto r = kernel_mf::grid_search(data, grid, 42);
  CHECK(r.best.epochs == 128);
  CHECK(r.scores.size() == 2);
  auto again = kernel_mf::grid_search(data, grid, 42);
  CHECK(again.score == r.score);
  std::vector<KernelMFHyper> one{bad};
  CHECK(kernel_mf::grid_search(data, one, 42).best.epochs == 1);
  CHECK(kernel_mf::default_grid().size() == 2916);
}

TEST_CASE("imputation rounding, clamping and observed cells") {
  auto s = testutil::schema(0, 4);
  CHECK(to_label(4.7, s) == 4);
  CHECK(to_label(2.49, s) == 2);
  CHECK(to_label(2.5, s) == 3);
  CHECK(to_label(-0.5, s) == 0);

  auto full = AnnotationMatrix::from_grid(rank2_grid(), s);
  KernelMFHyper hyper;
  hyper.epochs = 4;
  auto model = kernel_mf::train(full, hyper);
  auto out = kernel_mf::impute(full, model);
  CHECK(out.full_int == rank2_grid());

  AnnotationMatrix wrong(2, 2, s, {{0, 0, 1}, {1, 1, 1}});
  CHECK_THROWS_AS(kernel_mf::impute(wrong, model), DataError);
}

TEST_CASE("model json round trip") {
  Rng rng(9);
  auto m = testutil::random_matrix(rng, 6, 5, testutil::schema(0, 4), 0.5);
  KernelMFHyper hyper;
  hyper.kernel = Kernel::Sigmoid;
  hyper.gamma = 0.3;
  hyper.epochs = 8;
  auto model = kernel_mf::train(m, hyper);
  auto back = kernel_mf::model_from_json(kernel_mf::model_to_json(model));
  CHECK(back.item_factors == model.item_factors);
  CHECK(back.annotator_factors == model.annotator_factors);
  CHECK(back.hyper.gamma == 0.3);
  CHECK(kernel_mf::predict(back, 2, 3) == kernel_mf::predict(model, 2, 3));
}
