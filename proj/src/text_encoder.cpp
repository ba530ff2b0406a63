#include "annimpute/text_encoder.hpp"

#include <cmath>

#include "annimpute/errors.hpp"
#include "annimpute/kernels.hpp"

namespace annimpute {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_feature(std::string_view feature, std::uint64_t seed) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ mix64(seed);
  for (unsigned char ch : feature) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return mix64(h);
}

bool is_word_byte(unsigned char ch) {
  return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
         ch >= 0x80;
}

}  // namespace

TextEncoder::TextEncoder(EncoderConfig config) : config_(std::move(config)) {
  if (config_.dim == 0) throw UsageError("encoder: dim must be positive");
  if (config_.ngram_orders.empty()) throw UsageError("encoder: no n-gram orders");
  for (int n : config_.ngram_orders) {
    if (n < 1) throw UsageError("encoder: n-gram orders must be >= 1");
  }
}

std::vector<std::string> TextEncoder::tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char ch : text) {
    if (is_word_byte(ch)) {
      current.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a')
                                               : static_cast<char>(ch));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<double> TextEncoder::encode(std::string_view text) const {
  std::vector<double> vec(config_.dim, 0.0);
  const auto tokens = tokenize(text);
  for (int order : config_.ngram_orders) {
    const auto n = static_cast<std::size_t>(order);
    for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
      std::string feature = tokens[start];
      for (std::size_t k = 1; k < n; ++k) {
        feature.push_back(' ');
        feature += tokens[start + k];
      }
      const std::uint64_t h = hash_feature(feature, config_.seed);
      const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
      vec[(h & 0x7FFFFFFFFFFFFFFFULL) % config_.dim] += sign;
    }
  }
  double norm = 0.0;
  for (double v : vec) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : vec) v /= norm;
  }
  return vec;
}

RealGrid encode_all(const TextEncoder& encoder, const std::vector<std::string>& texts) {
  RealGrid features(texts.size(), encoder.dim());
  kernels::parallel_for(texts.size(), [&](std::size_t i) {
    auto vec = encoder.encode(texts[i]);
    std::copy(vec.begin(), vec.end(), features.row(i).begin());
  });
  return features;
}

nlohmann::json encoder_to_json(const EncoderConfig& config) {
  return {{"kind", "feature_hash"},
          {"dim", config.dim},
          {"ngram_orders", config.ngram_orders},
          {"seed", config.seed}};
}

EncoderConfig encoder_from_json(const nlohmann::json& j) {
  EncoderConfig config;
  try {
    if (j.value("kind", std::string("feature_hash")) != "feature_hash") {
      throw UsageError("encoder: only feature_hash is supported");
    }
    config.dim = j.value("dim", config.dim);
    config.ngram_orders = j.value("ngram_orders", config.ngram_orders);
    config.seed = j.value("seed", config.seed);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("encoder: ") + e.what());
  }
  return config;
}

}  // namespace annimpute
