#include "annimpute/ncf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "annimpute/errors.hpp"
#include "annimpute/util/json_io.hpp"
#include "annimpute/util/random.hpp"

namespace annimpute {

NCFLayout NCFLayout::make(std::size_t n_items, std::size_t n_annotators, std::size_t factors) {
  if (factors < 2 || factors % 2 != 0) {
    throw UsageError("ncf: factors must be even and >= 2");
  }
  NCFLayout l;
  l.n_items = n_items;
  l.n_annotators = n_annotators;
  l.factors = factors;
  std::size_t at = 0;
  l.item_embeddings = at;
  at += n_items * factors;
  l.annotator_embeddings = at;
  at += n_annotators * factors;
  l.w1 = at;
  at += l.hidden1() * l.input();
  l.b1 = at;
  at += l.hidden1();
  l.w2 = at;
  at += l.hidden2() * l.hidden1();
  l.b2 = at;
  at += l.hidden2();
  l.w3 = at;
  at += l.hidden2();
  l.b3 = at;
  at += 1;
  l.total = at;
  return l;
}

namespace ncf {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Activations {
  std::vector<double> input, z1, a1, z2, a2;
  double z3 = 0.0;
  double s = 0.0;  // sigmoid(z3)
  double output = 0.0;
};

void forward(const NCFModel& m, std::size_t item, std::size_t annotator, Activations& act) {
  const NCFLayout& l = m.layout;
  const double* p = m.params.data();
  act.input.resize(l.input());
  auto pi = m.item_embedding(item);
  auto qj = m.annotator_embedding(annotator);
  std::copy(pi.begin(), pi.end(), act.input.begin());
  std::copy(qj.begin(), qj.end(), act.input.begin() + static_cast<std::ptrdiff_t>(l.factors));

  act.z1.assign(l.hidden1(), 0.0);
  act.a1.assign(l.hidden1(), 0.0);
  for (std::size_t r = 0; r < l.hidden1(); ++r) {
    const double* row = p + l.w1 + r * l.input();
    double sum = p[l.b1 + r];
    for (std::size_t c = 0; c < l.input(); ++c) sum += row[c] * act.input[c];
    act.z1[r] = sum;
    act.a1[r] = sum > 0.0 ? sum : 0.0;
  }
  act.z2.assign(l.hidden2(), 0.0);
  act.a2.assign(l.hidden2(), 0.0);
  for (std::size_t r = 0; r < l.hidden2(); ++r) {
    const double* row = p + l.w2 + r * l.hidden1();
    double sum = p[l.b2 + r];
    for (std::size_t c = 0; c < l.hidden1(); ++c) sum += row[c] * act.a1[c];
    act.z2[r] = sum;
    act.a2[r] = sum > 0.0 ? sum : 0.0;
  }
  double z3 = p[l.b3];
  for (std::size_t c = 0; c < l.hidden2(); ++c) z3 += p[l.w3 + c] * act.a2[c];
  act.z3 = z3;
  act.s = sigmoid(z3);
  act.output = m.schema.min_label + m.schema.range() * act.s;
}

// Adds d(loss)/d(params) for one cell, given d(loss)/d(output).
void backward(const NCFModel& m, std::size_t item, std::size_t annotator, const Activations& act,
              double d_output, std::span<double> grad, std::vector<double>& d2,
              std::vector<double>& d1) {
  const NCFLayout& l = m.layout;
  const double* p = m.params.data();
  const double dz3 = d_output * m.schema.range() * act.s * (1.0 - act.s);

  grad[l.b3] += dz3;
  d2.assign(l.hidden2(), 0.0);
  for (std::size_t c = 0; c < l.hidden2(); ++c) {
    grad[l.w3 + c] += dz3 * act.a2[c];
    d2[c] = act.z2[c] > 0.0 ? dz3 * p[l.w3 + c] : 0.0;
  }

  d1.assign(l.hidden1(), 0.0);
  for (std::size_t r = 0; r < l.hidden2(); ++r) {
    if (d2[r] == 0.0) continue;
    grad[l.b2 + r] += d2[r];
    const double* row = p + l.w2 + r * l.hidden1();
    double* grow = grad.data() + l.w2 + r * l.hidden1();
    for (std::size_t c = 0; c < l.hidden1(); ++c) {
      grow[c] += d2[r] * act.a1[c];
      d1[c] += d2[r] * row[c];
    }
  }
  for (std::size_t c = 0; c < l.hidden1(); ++c) {
    if (act.z1[c] <= 0.0) d1[c] = 0.0;
  }

  double* g_item = grad.data() + l.item_embeddings + item * l.factors;
  double* g_annotator = grad.data() + l.annotator_embeddings + annotator * l.factors;
  for (std::size_t r = 0; r < l.hidden1(); ++r) {
    if (d1[r] == 0.0) continue;
    grad[l.b1 + r] += d1[r];
    const double* row = p + l.w1 + r * l.input();
    double* grow = grad.data() + l.w1 + r * l.input();
    for (std::size_t c = 0; c < l.input(); ++c) grow[c] += d1[r] * act.input[c];
    for (std::size_t c = 0; c < l.factors; ++c) {
      g_item[c] += d1[r] * row[c];
      g_annotator[c] += d1[r] * row[l.factors + c];
    }
  }
}

void require_indices(const NCFModel& model, std::size_t item, std::size_t annotator) {
  if (item >= model.layout.n_items || annotator >= model.layout.n_annotators) {
    throw DataError("ncf: index out of range (" + std::to_string(item) + "," +
                    std::to_string(annotator) + ")");
  }
}

double training_rmse(const NCFModel& model, const AnnotationMatrix& train) {
  return std::sqrt(batch_loss(model, train.cells()));
}

}  // namespace

NCFModel init_model(std::size_t n_items, std::size_t n_annotators, const LabelSchema& schema,
                    const NCFHyper& hyper) {
  NCFModel model;
  model.hyper = hyper;
  model.schema = schema;
  model.layout = NCFLayout::make(n_items, n_annotators, hyper.factors);
  model.params.assign(model.layout.total, 0.0);
  Rng rng(hyper.seed);
  const NCFLayout& l = model.layout;
  auto fill = [&](std::size_t from, std::size_t count) {
    for (std::size_t k = from; k < from + count; ++k) model.params[k] = rng.normal(0.0, 0.1);
  };
  fill(l.item_embeddings, (n_items + n_annotators) * l.factors);
  fill(l.w1, l.hidden1() * l.input());
  fill(l.w2, l.hidden2() * l.hidden1());
  fill(l.w3, l.hidden2());
  return model;
}

double predict(const NCFModel& model, std::size_t item, std::size_t annotator) {
  require_indices(model, item, annotator);
  Activations act;
  forward(model, item, annotator, act);
  return act.output;
}

double batch_loss(const NCFModel& model, std::span<const Cell> cells) {
  if (cells.empty()) return 0.0;
  Activations act;
  double sum = 0.0;
  for (const Cell& c : cells) {
    require_indices(model, c.item, c.annotator);
    forward(model, c.item, c.annotator, act);
    const double e = act.output - c.label;
    sum += e * e;
  }
  return sum / static_cast<double>(cells.size());
}

void batch_gradient(const NCFModel& model, std::span<const Cell> cells, std::span<double> grad) {
  if (grad.size() != model.params.size()) throw UsageError("ncf: gradient size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  if (cells.empty()) return;
  Activations act;
  std::vector<double> d1, d2;
  const double inv_n = 1.0 / static_cast<double>(cells.size());
  for (const Cell& c : cells) {
    require_indices(model, c.item, c.annotator);
    forward(model, c.item, c.annotator, act);
    backward(model, c.item, c.annotator, act, 2.0 * (act.output - c.label) * inv_n, grad, d2, d1);
  }
}

NCFModel train(const AnnotationMatrix& train, const NCFHyper& hyper) {
  if (train.empty()) throw DataError("ncf: training matrix has no observed cells");
  if (hyper.batch_size == 0) throw UsageError("ncf: batch size must be positive");
  NCFModel model = init_model(train.n_items(), train.n_annotators(), train.schema(), hyper);

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  const std::size_t n_params = model.params.size();
  std::vector<double> grad(n_params), m1(n_params, 0.0), m2(n_params, 0.0);
  double beta1_t = 1.0, beta2_t = 1.0;

  Rng rng(hyper.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<Cell> order(train.cells().begin(), train.cells().end());

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(std::span<Cell>(order));
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t count = std::min(hyper.batch_size, order.size() - start);
      batch_gradient(model, std::span<const Cell>(order).subspan(start, count), grad);
      beta1_t *= kBeta1;
      beta2_t *= kBeta2;
      const double step = hyper.learning_rate;
      for (std::size_t k = 0; k < n_params; ++k) {
        m1[k] = kBeta1 * m1[k] + (1.0 - kBeta1) * grad[k];
        m2[k] = kBeta2 * m2[k] + (1.0 - kBeta2) * grad[k] * grad[k];
        const double m_hat = m1[k] / (1.0 - beta1_t);
        const double v_hat = m2[k] / (1.0 - beta2_t);
        model.params[k] -= step * m_hat / (std::sqrt(v_hat) + kEps);
      }
    }
    const double loss = training_rmse(model, train);
    if (!std::isfinite(loss)) {
      throw NumericError("ncf: non-finite training loss at epoch " + std::to_string(epoch + 1) +
                         " with " + hyper_to_json(hyper).dump());
    }
    model.epoch_rmse.push_back(loss);
  }
  return model;
}

GridResult<NCFHyper> grid_search(const AnnotationMatrix& train, std::span<const NCFHyper> grid) {
  if (grid.empty()) throw UsageError("ncf: empty hyperparameter grid");
  std::vector<double> scores(grid.size(), std::numeric_limits<double>::quiet_NaN());
  kernels::parallel_for(grid.size(), [&](std::size_t k) {
    try {
      NCFModel model = ncf::train(train, grid[k]);
      const double score = training_rmse(model, train);
      if (std::isfinite(score)) scores[k] = score;
    } catch (const NumericError& e) {
      spdlog::warn("ncf grid combo {} skipped: {}", k, e.what());
    }
  });
  std::size_t best = grid.size();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::isnan(scores[k])) continue;
    if (best == grid.size() || scores[k] < scores[best]) best = k;
  }
  if (best == grid.size()) throw NumericError("ncf: every grid combination failed");
  return {grid[best], scores[best], std::move(scores)};
}

ImputedMatrices impute(const AnnotationMatrix& train, const NCFModel& model) {
  require_same_shape(train, model.layout.n_items, model.layout.n_annotators);
  return impute_cells(train, [&model](std::size_t i, std::size_t j) { return predict(model, i, j); });
}

std::vector<NCFHyper> default_grid(std::size_t epochs, std::uint64_t seed) {
  std::vector<NCFHyper> grid;
  for (std::size_t factors : {4, 8, 16, 32, 64, 128}) {
    for (double lr : {0.001, 0.0005, 0.0001, 0.00005}) {
      NCFHyper h;
      h.factors = factors;
      h.learning_rate = lr;
      h.epochs = epochs;
      h.seed = seed;
      grid.push_back(h);
    }
  }
  return grid;
}

nlohmann::json hyper_to_json(const NCFHyper& hyper) {
  return {{"factors", hyper.factors},
          {"learning_rate", hyper.learning_rate},
          {"epochs", hyper.epochs},
          {"seed", hyper.seed},
          {"batch_size", hyper.batch_size}};
}

NCFHyper hyper_from_json(const nlohmann::json& j) {
  NCFHyper h;
  try {
    h.factors = j.value("factors", h.factors);
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.epochs = j.value("epochs", h.epochs);
    h.seed = j.value("seed", h.seed);
    h.batch_size = j.value("batch_size", h.batch_size);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("ncf hyper: ") + e.what());
  }
  return h;
}

nlohmann::json model_to_json(const NCFModel& model) {
  return {{"format", "annimpute.ncf"},
          {"version", 1},
          {"hyper", hyper_to_json(model.hyper)},
          {"schema", schema_to_json(model.schema)},
          {"n_items", model.layout.n_items},
          {"n_annotators", model.layout.n_annotators},
          {"params", model.params}};
}

NCFModel model_from_json(const nlohmann::json& j) {
  require_format(j, "annimpute.ncf", 1);
  NCFModel model;
  model.hyper = hyper_from_json(j.at("hyper"));
  model.schema = schema_from_json(j.at("schema"));
  model.layout = NCFLayout::make(j.at("n_items").get<std::size_t>(),
                                 j.at("n_annotators").get<std::size_t>(), model.hyper.factors);
  model.params = j.at("params").get<std::vector<double>>();
  if (model.params.size() != model.layout.total) throw DataError("ncf: parameter count mismatch");
  return model;
}

}  // namespace ncf

}  // namespace annimpute
