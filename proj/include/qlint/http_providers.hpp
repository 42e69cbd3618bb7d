#pragma once

// HTTP implementations of ChatProvider / Embedder over the bundled
// cpp-httplib. Split from providers.hpp so offline code (mock, tests,
// fixtures) does not pay for the HTTP stack.

#include <chrono>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "qlint/errors.hpp"
#include "qlint/providers.hpp"

namespace qlint {

namespace detail {

struct HttpOutcome {
  int status = 0;
  std::string body;
};

inline bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

/// POST with the configured retry policy. Throws ProviderError once retries
/// are exhausted or on a non-retryable failure. Diagnostics carry the status
/// code and attempt count only — never the credential or the request body.
inline HttpOutcome post_with_retries(const ProviderConfig& config,
                                     const std::string& api_key,
                                     const std::string& body,
                                     long* retries_out) {
  auto [origin, path] = split_url(config.endpoint);
  httplib::Client cli(origin);
  auto timeout = std::chrono::duration<double>(config.timeout_seconds);
  cli.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  cli.set_read_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  httplib::Headers headers = {
      {"Authorization", "Bearer " + api_key},
  };

  int attempts = config.max_retries + 1;
  int last_status = 0;
  bool transport_failure = false;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      if (retries_out) ++*retries_out;
      auto delay = std::chrono::milliseconds(
          static_cast<long long>(config.backoff_base_ms) << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    network_request_count().fetch_add(1, std::memory_order_relaxed);
    httplib::Result res = cli.Post(path, headers, body, "application/json");
    if (!res) {
      transport_failure = true;
      last_status = 0;
      continue;  // transport error: retry
    }
    if (res->status == 200) return HttpOutcome{res->status, res->body};
    last_status = res->status;
    transport_failure = false;
    if (!retryable_status(res->status)) {
      throw ProviderError("provider returned HTTP " +
                          std::to_string(res->status) + " for " +
                          config.endpoint);
    }
  }
  if (transport_failure) {
    throw ProviderError("provider unreachable after " +
                        std::to_string(attempts) + " attempts: " +
                        config.endpoint);
  }
  throw ProviderError("provider returned HTTP " + std::to_string(last_status) +
                      " after " + std::to_string(attempts) + " attempts: " +
                      config.endpoint);
}

/// Resolve the credential. Fails before any network activity when unset.
inline std::string require_api_key(const ProviderConfig& config) {
  std::string key = getenv_or_empty(config.key_env);
  if (key.empty()) {
    throw ProviderError("authentication: environment variable " +
                        config.key_env + " is not set");
  }
  return key;
}

}  // namespace detail

class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderConfig config) : config_(std::move(config)) {}

  std::string chat_complete(const std::vector<ChatMessage>& messages) override {
    std::string key = detail::require_api_key(config_);
    std::string body = chat_request_body(config_.model, messages);
    auto outcome = detail::post_with_retries(config_, key, body, &retries_used_);
    nlohmann::json doc = nlohmann::json::parse(outcome.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") ||
        !doc["choices"].is_array() || doc["choices"].empty() ||
        !doc["choices"][0].contains("message") ||
        !doc["choices"][0]["message"].contains("content") ||
        !doc["choices"][0]["message"]["content"].is_string()) {
      throw ProviderError("unexpected chat-completion response shape from " +
                          config_.endpoint);
    }
    return doc["choices"][0]["message"]["content"].get<std::string>();
  }

  long retries_used() const { return retries_used_; }

 private:
  ProviderConfig config_;
  long retries_used_ = 0;
};

class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(ProviderConfig config) : config_(std::move(config)) {}

  std::vector<double> embed(std::string_view text) override {
    std::string key = detail::require_api_key(config_);
    std::string body = embed_request_body(config_.model, text);
    auto outcome = detail::post_with_retries(config_, key, body, &retries_used_);
    nlohmann::json doc = nlohmann::json::parse(outcome.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array() ||
        doc["data"].empty() || !doc["data"][0].contains("embedding") ||
        !doc["data"][0]["embedding"].is_array()) {
      throw ProviderError("unexpected embedding response shape from " +
                          config_.endpoint);
    }
    std::vector<double> v;
    for (const auto& x : doc["data"][0]["embedding"]) {
      if (!x.is_number()) {
        throw ProviderError("embedding vector contains a non-number from " +
                            config_.endpoint);
      }
      v.push_back(x.get<double>());
    }
    if (config_.embed_dimension > 0 &&
        static_cast<int>(v.size()) != config_.embed_dimension) {
      throw DimensionMismatch("embedding has dimension " +
                              std::to_string(v.size()) + ", configured " +
                              std::to_string(config_.embed_dimension));
    }
    return v;
  }

  int dimension() const override { return config_.embed_dimension; }
  long retries_used() const { return retries_used_; }

 private:
  ProviderConfig config_;
  long retries_used_ = 0;
};

}  // namespace qlint
