#include "annimpute/kernel_mf.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "annimpute/errors.hpp"
#include "annimpute/metrics.hpp"
#include "annimpute/splits.hpp"
#include "annimpute/util/json_io.hpp"
#include "annimpute/util/random.hpp"

namespace annimpute {

std::string_view to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::Linear: return "linear";
    case Kernel::Rbf: return "rbf";
    case Kernel::Sigmoid: return "sigmoid";
  }
  return "unknown";
}

Kernel kernel_from_string(std::string_view name) {
  if (name == "linear") return Kernel::Linear;
  if (name == "rbf") return Kernel::Rbf;
  if (name == "sigmoid") return Kernel::Sigmoid;
  throw UsageError("unknown kernel '" + std::string(name) + "'");
}

double KernelMFHyper::effective_gamma() const {
  return gamma.value_or(1.0 / static_cast<double>(factors));
}

namespace kernel_mf {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

double sigmoid(double x) {
  // Branching keeps exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool bounded(Kernel kernel) { return kernel != Kernel::Linear; }

void require_indices(const KernelMFModel& model, std::size_t item, std::size_t annotator) {
  if (item >= model.item_factors.rows() || annotator >= model.annotator_factors.rows()) {
    throw DataError("kernel_mf: index out of range (" + std::to_string(item) + "," +
                    std::to_string(annotator) + ")");
  }
}

// d K / d w and d K / d h at (w, h).
void kernel_partials(Kernel kernel, double gamma, std::span<const double> w,
                     std::span<const double> h, double& value, std::vector<double>& dw,
                     std::vector<double>& dh) {
  const std::size_t k = w.size();
  dw.assign(k, 0.0);
  dh.assign(k, 0.0);
  switch (kernel) {
    case Kernel::Linear:
      value = dot(w, h);
      for (std::size_t f = 0; f < k; ++f) {
        dw[f] = h[f];
        dh[f] = w[f];
      }
      break;
    case Kernel::Rbf: {
      double dist = 0.0;
      for (std::size_t f = 0; f < k; ++f) dist += (w[f] - h[f]) * (w[f] - h[f]);
      value = std::exp(-gamma * dist);
      for (std::size_t f = 0; f < k; ++f) {
        dw[f] = -2.0 * gamma * (w[f] - h[f]) * value;
        dh[f] = -dw[f];
      }
      break;
    }
    case Kernel::Sigmoid: {
      value = sigmoid(gamma * dot(w, h));
      const double slope = gamma * value * (1.0 - value);
      for (std::size_t f = 0; f < k; ++f) {
        dw[f] = slope * h[f];
        dh[f] = slope * w[f];
      }
      break;
    }
  }
}

double training_rmse(const KernelMFModel& model, const AnnotationMatrix& train) {
  double sum = 0.0;
  for (const Cell& c : train.cells()) {
    const double e = predict(model, c.item, c.annotator) - c.label;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(train.size()));
}

}  // namespace

double kernel_value(Kernel kernel, double gamma, std::span<const double> w,
                    std::span<const double> h) {
  switch (kernel) {
    case Kernel::Linear: return dot(w, h);
    case Kernel::Rbf: {
      double dist = 0.0;
      for (std::size_t f = 0; f < w.size(); ++f) dist += (w[f] - h[f]) * (w[f] - h[f]);
      return std::exp(-gamma * dist);
    }
    case Kernel::Sigmoid: return sigmoid(gamma * dot(w, h));
  }
  return 0.0;
}

KernelMFModel init_model(const AnnotationMatrix& train, const KernelMFHyper& hyper) {
  if (hyper.factors == 0) throw UsageError("kernel_mf: factors must be positive");
  KernelMFModel model;
  model.hyper = hyper;
  model.schema = train.schema();
  model.item_factors = RealGrid(train.n_items(), hyper.factors);
  model.annotator_factors = RealGrid(train.n_annotators(), hyper.factors);
  Rng rng(hyper.seed);
  for (double& v : model.item_factors.values()) v = rng.normal(hyper.init_mean, hyper.init_std);
  for (double& v : model.annotator_factors.values()) {
    v = rng.normal(hyper.init_mean, hyper.init_std);
  }
  if (bounded(hyper.kernel)) {
    model.bias = train.schema().min_label;
    model.scale = train.schema().range();
  } else {
    double sum = 0.0;
    for (const Cell& c : train.cells()) sum += c.label;
    model.bias = train.empty() ? 0.0 : sum / static_cast<double>(train.size());
    model.scale = 1.0;
  }
  return model;
}

double predict(const KernelMFModel& model, std::size_t item, std::size_t annotator) {
  require_indices(model, item, annotator);
  return model.bias + model.scale * kernel_value(model.hyper.kernel, model.hyper.effective_gamma(),
                                                 model.item_factors.row(item),
                                                 model.annotator_factors.row(annotator));
}

double cell_objective(const KernelMFModel& model, const Cell& cell) {
  const double e = predict(model, cell.item, cell.annotator) - cell.label;
  auto w = model.item_factors.row(cell.item);
  auto h = model.annotator_factors.row(cell.annotator);
  return e * e + model.hyper.regularization * (dot(w, w) + dot(h, h));
}

CellGradient cell_gradient(const KernelMFModel& model, const Cell& cell) {
  require_indices(model, cell.item, cell.annotator);
  auto w = model.item_factors.row(cell.item);
  auto h = model.annotator_factors.row(cell.annotator);
  double k_value = 0.0;
  std::vector<double> dk_dw, dk_dh;
  kernel_partials(model.hyper.kernel, model.hyper.effective_gamma(), w, h, k_value, dk_dw, dk_dh);
  const double e = model.bias + model.scale * k_value - cell.label;
  const double reg = model.hyper.regularization;

  CellGradient g;
  g.item.resize(w.size());
  g.annotator.resize(h.size());
  for (std::size_t f = 0; f < w.size(); ++f) {
    g.item[f] = 2.0 * e * model.scale * dk_dw[f] + 2.0 * reg * w[f];
    g.annotator[f] = 2.0 * e * model.scale * dk_dh[f] + 2.0 * reg * h[f];
  }
  if (!bounded(model.hyper.kernel)) {
    g.bias = 2.0 * e;
    g.scale = 2.0 * e * k_value;
  }
  return g;
}

KernelMFModel train(const AnnotationMatrix& train, const KernelMFHyper& hyper) {
  if (train.empty()) throw DataError("kernel_mf: training matrix has no observed cells");
  KernelMFModel model = init_model(train, hyper);

  // The shuffle stream is independent of the initialisation stream.
  Rng rng(hyper.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto cells = train.cells();
  const double lr = hyper.learning_rate;

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      const Cell& c = cells[idx];
      CellGradient g = cell_gradient(model, c);
      auto w = model.item_factors.row(c.item);
      auto h = model.annotator_factors.row(c.annotator);
      for (std::size_t f = 0; f < w.size(); ++f) {
        w[f] -= lr * g.item[f];
        h[f] -= lr * g.annotator[f];
      }
      if (!bounded(hyper.kernel)) {
        model.bias -= lr * g.bias;
        model.scale -= lr * g.scale;
      }
    }
    const double loss = training_rmse(model, train);
    if (!std::isfinite(loss)) {
      throw NumericError("kernel_mf: non-finite training loss at epoch " +
                         std::to_string(epoch + 1) + " with " + hyper_to_json(hyper).dump());
    }
    model.epoch_rmse.push_back(loss);
  }
  return model;
}

GridResult<KernelMFHyper> grid_search(const AnnotationMatrix& train,
                                      std::span<const KernelMFHyper> grid, std::uint64_t seed,
                                      double validation_fraction) {
  if (grid.empty()) throw UsageError("kernel_mf: empty hyperparameter grid");
  HoldoutSplit split = make_holdout(train, validation_fraction, seed);
  if (split.heldout_cells.empty()) {
    throw DataError("kernel_mf: validation split is empty; too few observed cells");
  }
  std::vector<double> truths;
  for (const Cell& c : split.heldout_cells) truths.push_back(c.label);

  std::vector<double> scores(grid.size(), std::numeric_limits<double>::quiet_NaN());
  kernels::parallel_for(grid.size(), [&](std::size_t k) {
    try {
      KernelMFModel model = kernel_mf::train(split.train, grid[k]);
      std::vector<double> preds;
      preds.reserve(truths.size());
      for (const Cell& c : split.heldout_cells) preds.push_back(predict(model, c.item, c.annotator));
      const double score = rmse(preds, truths);
      if (std::isfinite(score)) scores[k] = score;
    } catch (const NumericError& e) {
      spdlog::warn("kernel_mf grid combo {} skipped: {}", k, e.what());
    }
  });

  std::size_t best = grid.size();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::isnan(scores[k])) continue;
    if (best == grid.size() || scores[k] < scores[best]) best = k;
  }
  if (best == grid.size()) throw NumericError("kernel_mf: every grid combination failed");
  return {grid[best], scores[best], std::move(scores)};
}

ImputedMatrices impute(const AnnotationMatrix& train, const KernelMFModel& model) {
  require_same_shape(train, model.item_factors.rows(), model.annotator_factors.rows());
  return impute_cells(train, [&model](std::size_t i, std::size_t j) { return predict(model, i, j); });
}

std::vector<KernelMFHyper> default_grid() {
  std::vector<KernelMFHyper> grid;
  for (std::size_t factors : {1, 2, 4, 8, 16, 32}) {
    for (std::size_t epochs : {1, 2, 4, 8, 16, 32, 64, 128, 256}) {
      for (Kernel kernel : {Kernel::Linear, Kernel::Rbf, Kernel::Sigmoid}) {
        for (double reg : {0.1, 0.01, 0.001}) {
          for (double lr : {0.01, 0.001, 0.0001}) {
            for (std::uint64_t seed : {42, 85}) {
              KernelMFHyper h;
              h.factors = factors;
              h.epochs = epochs;
              h.kernel = kernel;
              h.regularization = reg;
              h.learning_rate = lr;
              h.init_mean = 0.0;
              h.init_std = 0.1;
              h.seed = seed;
              grid.push_back(h);
            }
          }
        }
      }
    }
  }
  return grid;
}

nlohmann::json hyper_to_json(const KernelMFHyper& hyper) {
  nlohmann::json j{{"factors", hyper.factors},
                   {"epochs", hyper.epochs},
                   {"kernel", std::string(to_string(hyper.kernel))},
                   {"regularization", hyper.regularization},
                   {"learning_rate", hyper.learning_rate},
                   {"init_mean", hyper.init_mean},
                   {"init_std", hyper.init_std},
                   {"seed", hyper.seed}};
  j["gamma"] = hyper.gamma ? nlohmann::json(*hyper.gamma) : nlohmann::json("auto");
  return j;
}

KernelMFHyper hyper_from_json(const nlohmann::json& j) {
  KernelMFHyper h;
  try {
    h.factors = j.value("factors", h.factors);
    h.epochs = j.value("epochs", h.epochs);
    h.kernel = kernel_from_string(j.value("kernel", std::string("linear")));
    if (j.contains("gamma") && !j["gamma"].is_string()) h.gamma = j["gamma"].get<double>();
    h.regularization = j.value("regularization", h.regularization);
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.init_mean = j.value("init_mean", h.init_mean);
    h.init_std = j.value("init_std", h.init_std);
    h.seed = j.value("seed", h.seed);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("kernel_mf hyper: ") + e.what());
  }
  return h;
}

nlohmann::json model_to_json(const KernelMFModel& model) {
  return {{"format", "annimpute.kernel_mf"},
          {"version", 1},
          {"hyper", hyper_to_json(model.hyper)},
          {"schema", schema_to_json(model.schema)},
          {"bias", model.bias},
          {"scale", model.scale},
          {"item_factors", grid_to_json(model.item_factors)},
          {"annotator_factors", grid_to_json(model.annotator_factors)}};
}

KernelMFModel model_from_json(const nlohmann::json& j) {
  require_format(j, "annimpute.kernel_mf", 1);
  KernelMFModel model;
  model.hyper = hyper_from_json(j.at("hyper"));
  model.schema = schema_from_json(j.at("schema"));
  model.bias = j.at("bias").get<double>();
  model.scale = j.at("scale").get<double>();
  model.item_factors = grid_from_json(j.at("item_factors"));
  model.annotator_factors = grid_from_json(j.at("annotator_factors"));
  if (model.item_factors.cols() != model.annotator_factors.cols()) {
    throw DataError("kernel_mf: factor widths differ");
  }
  return model;
}

}  // namespace kernel_mf

}  // namespace annimpute
