#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "annimpute/core/grid.hpp"
#include "annimpute/core/matrix.hpp"
#include "annimpute/imputer.hpp"

namespace annimpute {

enum class Kernel { Linear, Rbf, Sigmoid };

std::string_view to_string(Kernel kernel);
Kernel kernel_from_string(std::string_view name);

struct KernelMFHyper {
  std::size_t factors = 2;
  std::size_t epochs = 64;
  Kernel kernel = Kernel::Linear;
  std::optional<double> gamma;  // unset means "auto": 1 / factors
  double regularization = 0.01;
  double learning_rate = 0.01;
  double init_mean = 0.0;
  double init_std = 0.1;
  std::uint64_t seed = 42;

  [[nodiscard]] double effective_gamma() const;
};

// Prediction for cell (i, j) is bias + scale * K(w_i, h_j).
//
// For rbf and sigmoid the kernel is bounded, so bias and scale are pinned to
// min_label and (max_label - min_label). For the linear kernel both are
// trained, starting from the global mean label and 1.
struct KernelMFModel {
  RealGrid item_factors;
  RealGrid annotator_factors;
  double bias = 0.0;
  double scale = 1.0;
  KernelMFHyper hyper;
  LabelSchema schema;
  std::vector<double> epoch_rmse;  // training RMSE after each epoch
};

namespace kernel_mf {

double kernel_value(Kernel kernel, double gamma, std::span<const double> w,
                    std::span<const double> h);

// Factors drawn from N(init_mean, init_std^2) in item-then-annotator order.
KernelMFModel init_model(const AnnotationMatrix& train, const KernelMFHyper& hyper);

// Seeded SGD on sum (pred - label)^2 + reg * (|w_i|^2 + |h_j|^2).
// Throws NumericError if the training loss stops being finite.
KernelMFModel train(const AnnotationMatrix& train, const KernelMFHyper& hyper);

// Raw prediction (unrounded, unclamped). Throws DataError on bad indices.
double predict(const KernelMFModel& model, std::size_t item, std::size_t annotator);

// Per-cell objective and its analytic gradient, exposed for checking.
struct CellGradient {
  std::vector<double> item;
  std::vector<double> annotator;
  double bias = 0.0;   // zero for bounded kernels
  double scale = 0.0;  // zero for bounded kernels
};
double cell_objective(const KernelMFModel& model, const Cell& cell);
CellGradient cell_gradient(const KernelMFModel& model, const Cell& cell);

// Carves a validation holdout from `train` (make_holdout with `seed`), trains
// every combo on the remainder and keeps the one with the lowest validation
// RMSE. Combos that fail numerically are skipped with a warning.
GridResult<KernelMFHyper> grid_search(const AnnotationMatrix& train,
                                      std::span<const KernelMFHyper> grid, std::uint64_t seed,
                                      double validation_fraction = 0.05);

ImputedMatrices impute(const AnnotationMatrix& train, const KernelMFModel& model);

// The hyperparameter grid used for kernel MF imputation.
std::vector<KernelMFHyper> default_grid();

nlohmann::json hyper_to_json(const KernelMFHyper& hyper);
KernelMFHyper hyper_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const KernelMFModel& model);
KernelMFModel model_from_json(const nlohmann::json& j);

}  // namespace kernel_mf

}  // namespace annimpute
