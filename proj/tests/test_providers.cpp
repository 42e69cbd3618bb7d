#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "qlint/http_providers.hpp"
#include "qlint/providers.hpp"

using namespace qlint;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("qlint_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Local HTTP server whose handler script is a list of (status, body) pairs
/// consumed one per request; the last entry repeats.
class ScriptedServer {
 public:
  explicit ScriptedServer(std::vector<std::pair<int, std::string>> script)
      : script_(std::move(script)) {
    server_.Post("/v1/test", [this](const httplib::Request&, httplib::Response& res) {
      std::size_t i = std::min(hits_++, script_.size() - 1);
      res.status = script_[i].first;
      res.set_content(script_[i].second, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~ScriptedServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/test";
  }
  std::size_t hits() const { return hits_; }

 private:
  std::vector<std::pair<int, std::string>> script_;
  std::atomic<std::size_t> hits_{0};
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ProviderConfig test_config(const std::string& endpoint) {
  ProviderConfig c;
  c.endpoint = endpoint;
  c.model = "test-model";
  c.key_env = "QLINT_TEST_KEY";
  c.timeout_seconds = 5.0;
  c.max_retries = 2;
  c.backoff_base_ms = 1;
  return c;
}

const std::string kChatOk =
    "{\"choices\":[{\"message\":{\"role\":\"assistant\",\"content\":\"{}\"}}]}";

}  // namespace

TEST_CASE("chat request body is canonical and stable") {
  std::vector<ChatMessage> msgs = {{"system", "S"}, {"user", "U"}};
  CHECK(chat_request_body("m", msgs) ==
        "{\"model\":\"m\",\"messages\":[{\"role\":\"system\",\"content\":\"S\"},"
        "{\"role\":\"user\",\"content\":\"U\"}]}");
  // The mock key is a 16-hex-digit digest of exactly that body.
  std::string key = mock_key_for("m", msgs);
  CHECK(key.size() == 16);
  CHECK(key.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(key == mock_key_for("m", msgs));
  CHECK(key != mock_key_for("m", {{"system", "S"}, {"user", "V"}}));
  CHECK(key != mock_key_for("other", msgs));
}

TEST_CASE("mock chat provider replays canned bodies with zero network use") {
  fs::path dir = make_temp_dir("mock_chat");
  std::vector<ChatMessage> msgs = {{"system", "s"}, {"user", "hello"}};
  write_file(dir / (mock_key_for("mock", msgs) + ".txt"), "{\"findings\":[]}");

  long before = network_request_count().load();
  MockChatProvider mock(dir);
  CHECK(mock.chat_complete(msgs) == "{\"findings\":[]}");
  CHECK(network_request_count().load() == before);

  std::vector<ChatMessage> unknown = {{"system", "s"}, {"user", "other"}};
  CHECK_THROWS_AS(mock.chat_complete(unknown), ProviderError);
  fs::remove_all(dir);
}

TEST_CASE("deterministic embedder is seeded and collision-averse") {
  DeterministicEmbedder e(8, 42);
  auto v1 = e.embed("qc.h(0)");
  auto v2 = e.embed("qc.h(0)");
  REQUIRE(v1.size() == 8);
  CHECK(v1 == v2);

  DeterministicEmbedder other_seed(8, 43);
  CHECK(other_seed.embed("qc.h(0)") != v1);
  CHECK(e.embed("qc.h(1)") != v1);

  for (double x : v1) {
    CHECK(x >= -1.0);
    CHECK(x <= 1.0);
  }

  // No collisions across a small corpus of distinct texts.
  std::vector<std::vector<double>> seen;
  for (int i = 0; i < 50; ++i) {
    auto v = e.embed("text " + std::to_string(i));
    for (const auto& s : seen) CHECK(s != v);
    seen.push_back(std::move(v));
  }
}

TEST_CASE("http chat provider retries a transient 500 then succeeds") {
  ScriptedServer server({{500, "err"}, {200, kChatOk}});
  setenv("QLINT_TEST_KEY", "test-key-value", 1);
  HttpChatProvider provider(test_config(server.endpoint()));

  long before = network_request_count().load();
  CHECK(provider.chat_complete({{"system", "s"}, {"user", "u"}}) == "{}");
  CHECK(provider.retries_used() == 1);
  CHECK(network_request_count().load() == before + 2);
  CHECK(server.hits() == 2);
}

TEST_CASE("http chat provider fails fast without a credential") {
  ScriptedServer server({{200, kChatOk}});
  unsetenv("QLINT_TEST_KEY");
  HttpChatProvider provider(test_config(server.endpoint()));

  long before = network_request_count().load();
  try {
    provider.chat_complete({{"system", "s"}, {"user", "u"}});
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    // Redacted diagnostics name the variable, never a key value.
    CHECK(std::string(e.what()).find("QLINT_TEST_KEY") != std::string::npos);
  }
  CHECK(network_request_count().load() == before);  // no network activity
  CHECK(server.hits() == 0);
}

TEST_CASE("http chat provider gives up after configured retries") {
  ScriptedServer server({{500, "err"}});
  setenv("QLINT_TEST_KEY", "test-key-value", 1);
  auto config = test_config(server.endpoint());
  HttpChatProvider provider(config);

  CHECK_THROWS_AS(provider.chat_complete({{"system", "s"}, {"user", "u"}}),
                  ProviderError);
  CHECK(server.hits() == static_cast<std::size_t>(config.max_retries + 1));
}

TEST_CASE("http chat provider does not retry non-transient statuses") {
  ScriptedServer server({{404, "nope"}});
  setenv("QLINT_TEST_KEY", "test-key-value", 1);
  HttpChatProvider provider(test_config(server.endpoint()));

  CHECK_THROWS_AS(provider.chat_complete({{"system", "s"}, {"user", "u"}}),
                  ProviderError);
  CHECK(server.hits() == 1);
}

TEST_CASE("http embedder checks the configured dimension") {
  ScriptedServer server(
      {{200, "{\"data\":[{\"embedding\":[0.25,-0.5,0.125]}]}"}});
  setenv("QLINT_TEST_KEY", "test-key-value", 1);

  auto good = test_config(server.endpoint());
  good.embed_dimension = 3;
  CHECK(HttpEmbedder(good).embed("text") ==
        std::vector<double>{0.25, -0.5, 0.125});

  auto bad = test_config(server.endpoint());
  bad.embed_dimension = 4;
  CHECK_THROWS_AS(HttpEmbedder(bad).embed("text"), DimensionMismatch);
}
