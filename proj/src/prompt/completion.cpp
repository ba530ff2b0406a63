#include "annimpute/prompt/completion.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "annimpute/util/digest.hpp"
#include "annimpute/util/json_io.hpp"

namespace annimpute::prompt {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// "https://host:port/v1" -> ("https://host:port", "/v1")
std::pair<std::string, std::string> split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const std::size_t path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, ""};
  std::string path = url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_start), path};
}

}  // namespace

std::string prompt_hash(const std::string& prompt, const std::string& model, double temperature) {
  return sha256_hex(nlohmann::json::array({prompt, model, temperature}).dump());
}

nlohmann::json record_to_json(const CompletionRecord& record) {
  return {{"prompt_hash", record.prompt_hash},
          {"model", record.model},
          {"temperature", record.temperature},
          {"raw_response", record.raw_response},
          {"timestamp", record.timestamp}};
}

CompletionRecord record_from_json(const nlohmann::json& j) {
  CompletionRecord r;
  r.prompt_hash = j.at("prompt_hash").get<std::string>();
  r.model = j.value("model", "");
  r.temperature = j.value("temperature", 0.0);
  r.raw_response = j.at("raw_response").get<std::string>();
  r.timestamp = j.value("timestamp", "");
  return r;
}

CompletionCache::CompletionCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  try {
    for (const auto& j : read_ndjson(path_)) {
      CompletionRecord r = record_from_json(j);
      records_.try_emplace(r.prompt_hash, std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("completion cache " + path_.string() + ": " + e.what());
  }
}

std::optional<CompletionRecord> CompletionCache::find(const std::string& hash) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = records_.find(hash);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void CompletionCache::append(const CompletionRecord& record) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!records_.try_emplace(record.prompt_hash, record).second) return;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw DataError("cannot append to completion cache " + path_.string());
  out << record_to_json(record).dump() << '\n';
}

std::size_t CompletionCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return records_.size();
}

CompletionClient::CompletionClient(EndpointConfig config, CompletionCache& cache)
    : config_(std::move(config)), cache_(cache) {}

CompletionRecord CompletionClient::complete(const std::string& prompt) {
  const std::string hash = prompt_hash(prompt, config_.model, config_.temperature);
  if (auto hit = cache_.find(hash)) return *hit;
  if (config_.mode == CompletionMode::Replay) throw CacheMissError(hash);

  CompletionRecord record;
  record.prompt_hash = hash;
  record.model = config_.model;
  record.temperature = config_.temperature;
  record.raw_response = request(prompt);
  record.timestamp = utc_now();
  cache_.append(record);
  return record;
}

std::string CompletionClient::request(const std::string& prompt) {
  const char* token = std::getenv(config_.token_env.c_str());
  if (token == nullptr || *token == '\0') {
    throw EndpointError("environment variable " + config_.token_env + " is not set");
  }

  std::lock_guard<std::mutex> lock(request_mutex_);
  const auto since = std::chrono::steady_clock::now() - last_request_;
  if (since < config_.min_interval) std::this_thread::sleep_for(config_.min_interval - since);

  const auto [host, prefix] = split_url(config_.base_url);
  httplib::Client client(host);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_bearer_token_auth(token);

  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  spdlog::debug("POST {}{}/chat/completions", host, prefix);
  auto res = client.Post(prefix + "/chat/completions", body.dump(), "application/json");
  last_request_ = std::chrono::steady_clock::now();
  ++network_calls_;

  if (!res) throw EndpointError("request failed: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403) {
    throw EndpointError("authentication failed (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status != 200) throw EndpointError("HTTP status " + std::to_string(res->status));
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError(std::string("malformed completion response: ") + e.what());
  }
}

}  // namespace annimpute::prompt
