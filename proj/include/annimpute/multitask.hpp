#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "annimpute/core/dataset.hpp"
#include "annimpute/imputer.hpp"
#include "annimpute/text_encoder.hpp"

namespace annimpute {

struct MultitaskHyper {
  std::size_t epochs = 10;
  double learning_rate = 0.1;
  std::uint64_t seed = 42;
  std::size_t max_labels = 64;  // refuse schemas wider than this
};

// v_i: 1 where annotator j labelled item i in the training data.
using MaskVector = std::vector<std::uint8_t>;

// One linear head (dim -> K logits) per annotator over frozen text features.
struct MultitaskModel {
  EncoderConfig encoder;
  std::size_t dim = 0;
  std::size_t n_annotators = 0;
  LabelSchema schema;
  MultitaskHyper hyper;
  std::vector<double> weights;  // [annotator][label][dim]
  std::vector<double> biases;   // [annotator][label]

  [[nodiscard]] std::size_t num_labels() const noexcept {
    return static_cast<std::size_t>(schema.num_labels());
  }
};

namespace multitask {

std::vector<MaskVector> masks_of(const AnnotationMatrix& matrix);

// Observed labels; masked cells hold min_label and are never read.
LabelGrid targets_of(const AnnotationMatrix& matrix);

// Zero-initialised heads.
MultitaskModel init_model(std::size_t dim, std::size_t n_annotators, const LabelSchema& schema,
                          const MultitaskHyper& hyper, const EncoderConfig& encoder);

// Per epoch, items in seeded order; each item takes one SGD step on the sum
// of softmax cross-entropies of its unmasked annotations. Targets under a
// zero mask bit are ignored.
MultitaskModel train(const RealGrid& features, const LabelGrid& targets,
                     const std::vector<MaskVector>& masks, const LabelSchema& schema,
                     const MultitaskHyper& hyper, const EncoderConfig& encoder = {});
MultitaskModel train(const RealGrid& features, const AnnotationMatrix& matrix,
                     const MultitaskHyper& hyper, const EncoderConfig& encoder = {});
MultitaskModel train(const Dataset& dataset, const MultitaskHyper& hyper,
                     const EncoderConfig& encoder = {});

std::vector<double> logits(const MultitaskModel& model, std::span<const double> features,
                           std::size_t annotator);

double masked_loss(const MultitaskModel& model, std::span<const double> features,
                   std::span<const int> targets, const MaskVector& mask);

// Gradient of masked_loss; buffers sized like model.weights / model.biases
// are overwritten.
void masked_loss_gradient(const MultitaskModel& model, std::span<const double> features,
                          std::span<const int> targets, const MaskVector& mask,
                          std::span<double> grad_weights, std::span<double> grad_biases);

// Argmax label of one head; ties go to the smaller label.
int predict_individual(const MultitaskModel& model, std::span<const double> features,
                       std::size_t annotator);
int predict_individual(const MultitaskModel& model, std::string_view text, std::size_t annotator);

// Majority vote of all heads; ties go to the smaller label.
int predict_aggregate(const MultitaskModel& model, std::span<const double> features);
int predict_aggregate(const MultitaskModel& model, std::string_view text);

// Missing cells: full_raw is the softmax-expected label, full_int the argmax.
ImputedMatrices impute(const RealGrid& features, const AnnotationMatrix& train,
                       const MultitaskModel& model);
ImputedMatrices impute(const Dataset& dataset, const MultitaskModel& model);

// Precomputed item embeddings: CSV lines "item,v1,...,vd", one per item.
RealGrid load_embeddings(const std::filesystem::path& path, std::size_t n_items);

nlohmann::json hyper_to_json(const MultitaskHyper& hyper);
MultitaskHyper hyper_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const MultitaskModel& model);
MultitaskModel model_from_json(const nlohmann::json& j);

}  // namespace multitask

}  // namespace annimpute
