#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "annimpute/core/matrix.hpp"
#include "annimpute/imputer.hpp"

namespace annimpute {

struct NCFHyper {
  std::size_t factors = 8;  // embedding width f; must be even
  double learning_rate = 0.001;
  std::size_t epochs = 100;
  std::uint64_t seed = 42;
  std::size_t batch_size = 256;
};

// Offsets of each parameter block inside NCFModel::params.
//
// Tower: concat(item f, annotator f) -> f (relu) -> f/2 (relu) -> 1, then
// min_label + range * sigmoid(out). Weight matrices are row-major
// [out][in].
struct NCFLayout {
  std::size_t n_items = 0;
  std::size_t n_annotators = 0;
  std::size_t factors = 0;
  std::size_t item_embeddings = 0;
  std::size_t annotator_embeddings = 0;
  std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, w3 = 0, b3 = 0;
  std::size_t total = 0;

  static NCFLayout make(std::size_t n_items, std::size_t n_annotators, std::size_t factors);
  [[nodiscard]] std::size_t input() const noexcept { return 2 * factors; }
  [[nodiscard]] std::size_t hidden1() const noexcept { return factors; }
  [[nodiscard]] std::size_t hidden2() const noexcept { return factors / 2; }
};

struct NCFModel {
  NCFHyper hyper;
  LabelSchema schema;
  NCFLayout layout;
  std::vector<double> params;
  std::vector<double> epoch_rmse;

  [[nodiscard]] std::span<const double> item_embedding(std::size_t item) const {
    return {params.data() + layout.item_embeddings + item * layout.factors, layout.factors};
  }
  [[nodiscard]] std::span<const double> annotator_embedding(std::size_t annotator) const {
    return {params.data() + layout.annotator_embeddings + annotator * layout.factors,
            layout.factors};
  }
  std::span<double> annotator_embedding(std::size_t annotator) {
    return {params.data() + layout.annotator_embeddings + annotator * layout.factors,
            layout.factors};
  }
};

namespace ncf {

// Embeddings and weights from N(0, 0.1^2); biases zero.
NCFModel init_model(std::size_t n_items, std::size_t n_annotators, const LabelSchema& schema,
                    const NCFHyper& hyper);

// Adam (0.9, 0.999, 1e-8) on the mean squared error over seeded mini-batches.
// Throws NumericError if the loss stops being finite.
NCFModel train(const AnnotationMatrix& train, const NCFHyper& hyper);

// Forward pass; always within [min_label, max_label].
double predict(const NCFModel& model, std::size_t item, std::size_t annotator);

// Mean squared error over `cells` and its gradient w.r.t. every parameter.
// `grad` must have model.params.size() entries and is overwritten.
double batch_loss(const NCFModel& model, std::span<const Cell> cells);
void batch_gradient(const NCFModel& model, std::span<const Cell> cells, std::span<double> grad);

// Trains every combo on the full matrix and keeps the lowest training RMSE.
GridResult<NCFHyper> grid_search(const AnnotationMatrix& train, std::span<const NCFHyper> grid);

ImputedMatrices impute(const AnnotationMatrix& train, const NCFModel& model);

// factors x learning rate grid with fixed epochs and seed.
std::vector<NCFHyper> default_grid(std::size_t epochs = 100, std::uint64_t seed = 42);

nlohmann::json hyper_to_json(const NCFHyper& hyper);
NCFHyper hyper_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const NCFModel& model);
NCFModel model_from_json(const nlohmann::json& j);

}  // namespace ncf

}  // namespace annimpute
