#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "annimpute/core/grid.hpp"

namespace annimpute {

struct EncoderConfig {
  std::size_t dim = 1024;
  std::vector<int> ngram_orders{1, 2};
  std::uint64_t seed = 0;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// Signed feature hashing of word n-grams into `dim` buckets, L2-normalised.
// Deterministic for a given config; empty text encodes to the zero vector.
class TextEncoder {
 public:
  explicit TextEncoder(EncoderConfig config);

  [[nodiscard]] const EncoderConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t dim() const noexcept { return config_.dim; }

  [[nodiscard]] std::vector<double> encode(std::string_view text) const;

  // Lowercased runs of ASCII alphanumerics (bytes >= 0x80 count as word
  // characters so UTF-8 words stay intact).
  static std::vector<std::string> tokenize(std::string_view text);

 private:
  EncoderConfig config_;
};

// Row i = encoder.encode(texts[i]).
RealGrid encode_all(const TextEncoder& encoder, const std::vector<std::string>& texts);

nlohmann::json encoder_to_json(const EncoderConfig& config);
EncoderConfig encoder_from_json(const nlohmann::json& j);

}  // namespace annimpute
