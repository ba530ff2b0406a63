#include "annimpute/multitask.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "annimpute/core/stats.hpp"
#include "annimpute/errors.hpp"
#include "annimpute/util/json_io.hpp"
#include "annimpute/util/random.hpp"

namespace annimpute::multitask {

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

double log_sum_exp(const std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - top);
  return top + std::log(sum);
}

std::size_t argmax_first(const std::vector<double>& z) {
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

void require_annotator(const MultitaskModel& model, std::size_t annotator) {
  if (annotator >= model.n_annotators) {
    throw DataError("multitask: annotator index out of range: " + std::to_string(annotator));
  }
}

void require_features(const MultitaskModel& model, std::span<const double> features) {
  if (features.size() != model.dim) throw DataError("multitask: feature width mismatch");
}

}  // namespace

std::vector<MaskVector> masks_of(const AnnotationMatrix& matrix) {
  std::vector<MaskVector> masks(matrix.n_items(), MaskVector(matrix.n_annotators(), 0));
  for (const Cell& c : matrix.cells()) masks[c.item][c.annotator] = 1;
  return masks;
}

LabelGrid targets_of(const AnnotationMatrix& matrix) {
  LabelGrid targets(matrix.n_items(), matrix.n_annotators(), matrix.schema().min_label);
  for (const Cell& c : matrix.cells()) targets(c.item, c.annotator) = c.label;
  return targets;
}

MultitaskModel init_model(std::size_t dim, std::size_t n_annotators, const LabelSchema& schema,
                          const MultitaskHyper& hyper, const EncoderConfig& encoder) {
  schema.validate();
  if (static_cast<std::size_t>(schema.num_labels()) > hyper.max_labels) {
    throw UsageError("multitask: schema has " + std::to_string(schema.num_labels()) +
                     " labels, above the configured limit of " +
                     std::to_string(hyper.max_labels));
  }
  MultitaskModel model;
  model.encoder = encoder;
  model.dim = dim;
  model.n_annotators = n_annotators;
  model.schema = schema;
  model.hyper = hyper;
  model.weights.assign(n_annotators * model.num_labels() * dim, 0.0);
  model.biases.assign(n_annotators * model.num_labels(), 0.0);
  return model;
}

std::vector<double> logits(const MultitaskModel& model, std::span<const double> features,
                           std::size_t annotator) {
  require_annotator(model, annotator);
  require_features(model, features);
  const std::size_t k_labels = model.num_labels();
  std::vector<double> out(k_labels);
  const double* w = model.weights.data() + annotator * k_labels * model.dim;
  for (std::size_t k = 0; k < k_labels; ++k) {
    double sum = model.biases[annotator * k_labels + k];
    const double* row = w + k * model.dim;
    for (std::size_t f = 0; f < model.dim; ++f) sum += row[f] * features[f];
    out[k] = sum;
  }
  return out;
}

double masked_loss(const MultitaskModel& model, std::span<const double> features,
                   std::span<const int> targets, const MaskVector& mask) {
  double loss = 0.0;
  for (std::size_t j = 0; j < model.n_annotators; ++j) {
    if (!mask[j]) continue;
    auto z = logits(model, features, j);
    loss += log_sum_exp(z) - z[model.schema.index_of(targets[j])];
  }
  return loss;
}

void masked_loss_gradient(const MultitaskModel& model, std::span<const double> features,
                          std::span<const int> targets, const MaskVector& mask,
                          std::span<double> grad_weights, std::span<double> grad_biases) {
  if (grad_weights.size() != model.weights.size() || grad_biases.size() != model.biases.size()) {
    throw UsageError("multitask: gradient buffer size mismatch");
  }
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_biases.begin(), grad_biases.end(), 0.0);
  const std::size_t k_labels = model.num_labels();
  for (std::size_t j = 0; j < model.n_annotators; ++j) {
    if (!mask[j]) continue;
    auto p = logits(model, features, j);
    softmax_inplace(p);
    p[model.schema.index_of(targets[j])] -= 1.0;
    for (std::size_t k = 0; k < k_labels; ++k) {
      grad_biases[j * k_labels + k] = p[k];
      double* row = grad_weights.data() + (j * k_labels + k) * model.dim;
      for (std::size_t f = 0; f < model.dim; ++f) row[f] = p[k] * features[f];
    }
  }
}

MultitaskModel train(const RealGrid& features, const LabelGrid& targets,
                     const std::vector<MaskVector>& masks, const LabelSchema& schema,
                     const MultitaskHyper& hyper, const EncoderConfig& encoder) {
  const std::size_t n_items = features.rows();
  if (targets.rows() != n_items || masks.size() != n_items) {
    throw DataError("multitask: features, targets and masks disagree on item count");
  }
  const std::size_t n_annotators = targets.cols();
  for (const auto& mask : masks) {
    if (mask.size() != n_annotators) throw DataError("multitask: mask width mismatch");
  }
  for (std::size_t i = 0; i < n_items; ++i) {
    for (std::size_t j = 0; j < n_annotators; ++j) {
      if (masks[i][j] && !schema.contains(targets(i, j))) {
        throw DataError("multitask: label out of range at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
    }
  }

  MultitaskModel model = init_model(features.cols(), n_annotators, schema, hyper, encoder);
  const std::size_t k_labels = model.num_labels();
  const std::size_t dim = model.dim;
  const double lr = hyper.learning_rate;

  Rng rng(hyper.seed);
  std::vector<std::size_t> order(n_items);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t i : order) {
      auto x = features.row(i);
      // Heads are independent, so each unmasked head is stepped as soon as
      // its gradient is known.
      for (std::size_t j = 0; j < n_annotators; ++j) {
        if (!masks[i][j]) continue;
        auto p = logits(model, x, j);
        const std::size_t target = schema.index_of(targets(i, j));
        epoch_loss += log_sum_exp(p) - p[target];
        softmax_inplace(p);
        p[target] -= 1.0;
        for (std::size_t k = 0; k < k_labels; ++k) {
          model.biases[j * k_labels + k] -= lr * p[k];
          double* row = model.weights.data() + (j * k_labels + k) * dim;
          const double step = lr * p[k];
          for (std::size_t f = 0; f < dim; ++f) row[f] -= step * x[f];
        }
      }
    }
    if (!std::isfinite(epoch_loss)) {
      throw NumericError("multitask: non-finite loss at epoch " + std::to_string(epoch + 1) +
                         " with " + hyper_to_json(hyper).dump());
    }
  }
  return model;
}

MultitaskModel train(const RealGrid& features, const AnnotationMatrix& matrix,
                     const MultitaskHyper& hyper, const EncoderConfig& encoder) {
  if (features.rows() != matrix.n_items()) {
    throw DataError("multitask: feature rows do not match item count");
  }
  return train(features, targets_of(matrix), masks_of(matrix), matrix.schema(), hyper, encoder);
}

MultitaskModel train(const Dataset& dataset, const MultitaskHyper& hyper,
                     const EncoderConfig& encoder) {
  TextEncoder enc(encoder);
  return train(encode_all(enc, dataset.texts), dataset.matrix, hyper, encoder);
}

int predict_individual(const MultitaskModel& model, std::span<const double> features,
                       std::size_t annotator) {
  return model.schema.label_at(argmax_first(logits(model, features, annotator)));
}

int predict_individual(const MultitaskModel& model, std::string_view text, std::size_t annotator) {
  return predict_individual(model, TextEncoder(model.encoder).encode(text), annotator);
}

int predict_aggregate(const MultitaskModel& model, std::span<const double> features) {
  std::vector<int> votes;
  votes.reserve(model.n_annotators);
  for (std::size_t j = 0; j < model.n_annotators; ++j) {
    votes.push_back(predict_individual(model, features, j));
  }
  return majority_label(votes, model.schema);
}

int predict_aggregate(const MultitaskModel& model, std::string_view text) {
  return predict_aggregate(model, TextEncoder(model.encoder).encode(text));
}

ImputedMatrices impute(const RealGrid& features, const AnnotationMatrix& train,
                       const MultitaskModel& model) {
  require_same_shape(train, features.rows(), model.n_annotators);
  return impute_cells(
      train,
      [&](std::size_t i, std::size_t j) {
        auto p = logits(model, features.row(i), j);
        softmax_inplace(p);
        double expected = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) expected += p[k] * model.schema.label_at(k);
        return expected;
      },
      [&](std::size_t i, std::size_t j, double) {
        return predict_individual(model, features.row(i), j);
      });
}

ImputedMatrices impute(const Dataset& dataset, const MultitaskModel& model) {
  TextEncoder enc(model.encoder);
  return impute(encode_all(enc, dataset.texts), dataset.matrix, model);
}

RealGrid load_embeddings(const std::filesystem::path& path, std::size_t n_items) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file " + path.string());
  std::vector<std::vector<double>> rows(n_items);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    std::vector<double> values;
    std::size_t index = 0;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const char* b = line.data() + pos;
      const char* e = line.data() + comma;
      if (first) {
        auto [ptr, ec] = std::from_chars(b, e, index);
        if (ec != std::errc{} || ptr != e) throw DataError(where + ": bad item index");
        first = false;
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || ptr != e) throw DataError(where + ": bad value");
        values.push_back(v);
      }
      pos = comma + 1;
    }
    if (index >= n_items) throw DataError(where + ": item index out of range");
    if (values.empty()) throw DataError(where + ": empty vector");
    if (dim == 0) dim = values.size();
    if (values.size() != dim) throw DataError(where + ": inconsistent vector width");
    rows[index] = std::move(values);
  }
  RealGrid grid(n_items, dim);
  for (std::size_t i = 0; i < n_items; ++i) {
    if (rows[i].empty()) throw DataError("embeddings: missing vector for item " + std::to_string(i));
    std::copy(rows[i].begin(), rows[i].end(), grid.row(i).begin());
  }
  return grid;
}

nlohmann::json hyper_to_json(const MultitaskHyper& hyper) {
  return {{"epochs", hyper.epochs},
          {"learning_rate", hyper.learning_rate},
          {"seed", hyper.seed},
          {"max_labels", hyper.max_labels}};
}

MultitaskHyper hyper_from_json(const nlohmann::json& j) {
  MultitaskHyper h;
  try {
    h.epochs = j.value("epochs", h.epochs);
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.seed = j.value("seed", h.seed);
    h.max_labels = j.value("max_labels", h.max_labels);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("multitask hyper: ") + e.what());
  }
  return h;
}

nlohmann::json model_to_json(const MultitaskModel& model) {
  return {{"format", "annimpute.multitask"},
          {"version", 1},
          {"encoder", encoder_to_json(model.encoder)},
          {"dim", model.dim},
          {"n_annotators", model.n_annotators},
          {"schema", schema_to_json(model.schema)},
          {"hyper", hyper_to_json(model.hyper)},
          {"weights", model.weights},
          {"biases", model.biases}};
}

MultitaskModel model_from_json(const nlohmann::json& j) {
  require_format(j, "annimpute.multitask", 1);
  MultitaskModel model = init_model(j.at("dim").get<std::size_t>(),
                                    j.at("n_annotators").get<std::size_t>(),
                                    schema_from_json(j.at("schema")),
                                    hyper_from_json(j.at("hyper")),
                                    encoder_from_json(j.at("encoder")));
  auto weights = j.at("weights").get<std::vector<double>>();
  auto biases = j.at("biases").get<std::vector<double>>();
  if (weights.size() != model.weights.size() || biases.size() != model.biases.size()) {
    throw DataError("multitask: head shapes do not match dim/annotators/labels");
  }
  model.weights = std::move(weights);
  model.biases = std::move(biases);
  return model;
}

}  // namespace annimpute::multitask
