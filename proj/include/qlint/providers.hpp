#pragma once

// External-service clients (chat completion, text embedding) behind narrow
// interfaces, plus deterministic replay/mock implementations.
//
// Wire shape is the de-facto chat-completions / embeddings JSON schema, so
// the HTTP clients and the directory-backed mock are interchangeable: the
// mock keys canned responses by a stable hash of the exact request body the
// HTTP client would send.
//
// Credentials are read from the environment at call time (default variable
// QLINT_API_KEY), are never persisted, and never appear in diagnostics.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qlint/errors.hpp"

namespace qlint {

inline constexpr std::string_view kDefaultKeyEnv = "QLINT_API_KEY";

struct ProviderConfig {
  std::string endpoint;          // full URL, e.g. https://host/v1/chat/completions
  std::string model;             // provider model identifier
  std::string key_env = std::string(kDefaultKeyEnv);
  double timeout_seconds = 60.0;
  int max_retries = 3;           // attempts beyond the first
  int max_concurrency = 4;
  int backoff_base_ms = 250;     // doubled per retry; tests shrink this
  int embed_dimension = 0;       // expected vector length; 0 = accept any
};

struct ChatMessage {
  std::string role;     // "system" | "user" | "assistant"
  std::string content;
};

/// Count of HTTP requests actually sent. Replay runs must leave it at zero.
inline std::atomic<long>& network_request_count() {
  static std::atomic<long> count{0};
  return count;
}

namespace detail {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

/// Split "scheme://host[:port]/path" into the client origin and the path.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
  std::size_t scheme = url.find("://");
  std::size_t path_start =
      url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string getenv_or_empty(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : std::string();
}

}  // namespace detail

/// Exact JSON body the chat client sends; also the mock's hash input.
inline std::string chat_request_body(const std::string& model,
                                     const std::vector<ChatMessage>& messages) {
  nlohmann::ordered_json body;
  body["model"] = model;
  auto& msgs = body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  }
  return body.dump();
}

/// Exact JSON body the embedding client sends.
inline std::string embed_request_body(const std::string& model,
                                      std::string_view text) {
  nlohmann::ordered_json body;
  body["model"] = model;
  body["input"] = std::string(text);
  return body.dump();
}

/// Stable key under which the mock looks up a canned chat response.
inline std::string mock_key_for(const std::string& model,
                                const std::vector<ChatMessage>& messages) {
  return detail::hex64(detail::fnv1a64(chat_request_body(model, messages)));
}

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  /// Send one conversation, return the assistant text verbatim.
  virtual std::string chat_complete(const std::vector<ChatMessage>& messages) = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
  virtual int dimension() const = 0;
};

/// Replays canned assistant bodies from <dir>/<request-hash>.txt.
/// Performs no network activity.
class MockChatProvider : public ChatProvider {
 public:
  explicit MockChatProvider(std::filesystem::path dir, std::string model = "mock")
      : dir_(std::move(dir)), model_(std::move(model)) {}

  std::string chat_complete(const std::vector<ChatMessage>& messages) override {
    std::string key = mock_key_for(model_, messages);
    std::filesystem::path file = dir_ / (key + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      throw ProviderError("mock response missing: " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  const std::string& model() const { return model_; }

 private:
  std::filesystem::path dir_;
  std::string model_;
};

/// Hash-to-vector embedder for offline tests and KB fixtures: deterministic,
/// seed-dependent, and (for practical purposes) collision-free on the corpus.
class DeterministicEmbedder : public Embedder {
 public:
  explicit DeterministicEmbedder(int dimension = 8, std::uint64_t seed = 0)
      : dimension_(dimension), seed_(seed) {}

  std::vector<double> embed(std::string_view text) override {
    std::uint64_t state = detail::fnv1a64(text) ^ (seed_ * 0x9e3779b97f4a7c15ull);
    std::vector<double> v(static_cast<std::size_t>(dimension_));
    for (auto& x : v) {
      state = splitmix64(state);
      // 53 high bits -> [0,1), then center on zero.
      x = static_cast<double>(state >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
    }
    return v;
  }

  int dimension() const override { return dimension_; }

 private:
  static std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  int dimension_;
  std::uint64_t seed_;
};

}  // namespace qlint
