#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "annimpute/errors.hpp"

namespace annimpute::prompt {

class CacheMissError : public DataError {
 public:
  explicit CacheMissError(const std::string& prompt_hash)
      : DataError("completion cache miss for prompt " + prompt_hash), hash_(prompt_hash) {}
  [[nodiscard]] const std::string& prompt_hash() const noexcept { return hash_; }

 private:
  std::string hash_;
};

class EndpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompletionRecord {
  std::string prompt_hash;
  std::string model;
  double temperature = 0.0;
  std::string raw_response;
  std::string timestamp;  // UTC, set when a live response arrives
};

enum class CompletionMode { Replay, Live };

struct EndpointConfig {
  CompletionMode mode = CompletionMode::Replay;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  std::string token_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  std::chrono::milliseconds min_interval{0};
  std::chrono::seconds timeout{60};
};

// Content digest of (prompt, model, temperature).
std::string prompt_hash(const std::string& prompt, const std::string& model, double temperature);

nlohmann::json record_to_json(const CompletionRecord& record);
CompletionRecord record_from_json(const nlohmann::json& j);

// NDJSON completion cache. Reads are shared; appends are serialized and
// written through to the file.
class CompletionCache {
 public:
  CompletionCache() = default;
  explicit CompletionCache(std::filesystem::path path);

  [[nodiscard]] std::optional<CompletionRecord> find(const std::string& hash) const;
  void append(const CompletionRecord& record);
  [[nodiscard]] std::size_t size() const;

 private:
  std::filesystem::path path_;
  std::map<std::string, CompletionRecord> records_;
  mutable std::mutex mutex_;
};

class CompletionClient {
 public:
  CompletionClient(EndpointConfig config, CompletionCache& cache);

  // Replay: cache lookup only, CacheMissError on a miss. Live: cache first,
  // then one rate-limited chat/completions request whose answer is cached.
  CompletionRecord complete(const std::string& prompt);

  [[nodiscard]] std::size_t network_calls() const noexcept { return network_calls_; }

 private:
  std::string request(const std::string& prompt);

  EndpointConfig config_;
  CompletionCache& cache_;
  std::mutex request_mutex_;
  std::chrono::steady_clock::time_point last_request_{};
  std::size_t network_calls_ = 0;
};

}  // namespace annimpute::prompt
