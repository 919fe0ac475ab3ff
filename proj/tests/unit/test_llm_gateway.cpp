#include <atomic>
#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "sbench/llm_gateway.hpp"

using namespace sbench;
using nlohmann::json;

namespace {

// Canned chat-completion responder on a loopback port.
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit StubServer(Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string completion(const std::string& content) {
  return json{{"id", "x"}, {"choices", json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}})}}
      .dump();
}

ModelHandle handle_for(const StubServer& server) {
  ModelHandle h;
  h.model_id = "stub-model";
  h.endpoint = server.endpoint();
  h.request_params.timeout_s = 5;
  h.retry.max_retries = 2;
  return h;
}

std::vector<ChatMessage> history() {
  return {{Role::system, "sys"}, {Role::user, "task"}};
}

}  // namespace

TEST_SUITE("llm_gateway") {
  TEST_CASE("returns the stored body's content verbatim") {
    const std::string content = "```java\nclass A {}\n```\n  trailing  \t\n\xC3\xA9";
    const std::string body = completion(content);
    std::string seen_body;
    std::string seen_auth;
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
      seen_body = req.body;
      seen_auth = req.get_header_value("Authorization");
      res.set_content(body, "application/json");
    });
    ::setenv("SBENCH_TEST_TOKEN", "sekret", 1);
    auto h = handle_for(server);
    h.auth_ref = "SBENCH_TEST_TOKEN";
    h.request_params.seed = 42;
    HttpChatModel model(h);
    const auto reply = model.complete(history());
    CHECK(reply.role == Role::assistant);
    CHECK(reply.content == json::parse(body)["choices"][0]["message"]["content"].get<std::string>());
    CHECK(seen_auth == "Bearer sekret");
    const auto sent = json::parse(seen_body);
    CHECK(sent["model"] == "stub-model");
    CHECK(sent["seed"] == 42);
    CHECK(sent["temperature"] == doctest::Approx(0.2));
    CHECK(sent["messages"].size() == 2);
    CHECK(sent["messages"][0]["role"] == "system");
    CHECK(sent["messages"][1]["content"] == "task");
  }

  TEST_CASE("transient failures are retried with exponential backoff") {
    std::atomic<int> calls{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
      if (++calls <= 2) {
        res.status = 503;
        res.set_content("busy", "text/plain");
      } else {
        res.set_content(completion("ok"), "application/json");
      }
    });
    HttpChatModel model(handle_for(server));
    std::vector<std::chrono::milliseconds> sleeps;
    model.set_sleep([&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    CHECK(model.complete(history()).content == "ok");
    CHECK(calls == 3);
    CHECK(sleeps == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500), std::chrono::milliseconds(1000)});
  }

  TEST_CASE("exhausted retries raise a gateway error") {
    std::atomic<int> calls{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 500;
    });
    HttpChatModel model(handle_for(server));
    model.set_sleep([](std::chrono::milliseconds) {});
    try {
      model.complete(history());
      FAIL("expected GatewayError");
    } catch (const GatewayError& e) {
      CHECK(e.model_id() == "stub-model");
      CHECK(e.attempt() == 3);
      CHECK(std::string(e.what()).find("HTTP status 500") != std::string::npos);
    }
    CHECK(calls == 3);
  }

  TEST_CASE("malformed response bodies are errors") {
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"choices\": []}", "application/json");
    });
    auto h = handle_for(server);
    h.retry.max_retries = 0;
    HttpChatModel model(h);
    CHECK_THROWS_WITH_AS(model.complete(history()), doctest::Contains("malformed"), GatewayError);
    CHECK_THROWS_AS(parse_response_content("not json"), Error);
    CHECK_THROWS_AS(parse_response_content(R"({"choices":[{"message":{"content":5}}]})"), Error);
  }

  TEST_CASE("connection refused is a gateway error") {
    ModelHandle h;
    h.model_id = "down";
    h.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    h.request_params.timeout_s = 2;
    h.retry.max_retries = 1;
    HttpChatModel model(h);
    model.set_sleep([](std::chrono::milliseconds) {});
    CHECK_THROWS_AS(model.complete(history()), GatewayError);
  }

  TEST_CASE("missing credential variable fails the request") {
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
      res.set_content(completion("ok"), "application/json");
    });
    auto h = handle_for(server);
    h.auth_ref = "SBENCH_TEST_TOKEN_THAT_IS_NOT_SET";
    h.retry.max_retries = 0;
    HttpChatModel model(h);
    CHECK_THROWS_WITH_AS(model.complete(history()), doctest::Contains("not set"), GatewayError);
  }

  TEST_CASE("history must start with the system role") {
    ScriptedModel model({"x"});
    CHECK_THROWS_AS(model.complete({}), std::invalid_argument);
    const std::vector<ChatMessage> bad{{Role::user, "hi"}};
    CHECK_THROWS_AS(model.complete(bad), std::invalid_argument);
  }

  TEST_CASE("scripted model replays then reports exhaustion") {
    ScriptedModel model({"one", "two"}, "mock");
    CHECK(model.complete(history()).content == "one");
    CHECK(model.complete(history()).content == "two");
    try {
      model.complete(history());
      FAIL("expected GatewayError");
    } catch (const GatewayError& e) {
      CHECK(e.attempt() == 3);
      CHECK(std::string(e.what()).find("script exhausted") != std::string::npos);
    }
  }

  TEST_CASE("script book lookup with wildcards") {
    const auto book = ScriptBook::parse(R"({"responses": {
      "baseline": {"Java/0": ["a"], "*": ["b"]},
      "*": {"Java/1": ["c"]}}})");
    CHECK(book.lookup("baseline", "Java/0") == std::vector<std::string>{"a"});
    CHECK(book.lookup("baseline", "Java/9") == std::vector<std::string>{"b"});
    CHECK(book.lookup("instruct", "Java/1") == std::vector<std::string>{"c"});
    CHECK(book.lookup("instruct", "Java/2").empty());
    CHECK_THROWS_AS(ScriptBook::parse("{}"), ConfigError);
    CHECK_THROWS_AS(ScriptBook::parse(R"({"responses": {"baseline": {"x": [1]}}})"), ConfigError);
  }

  TEST_CASE("backoff doubles and is capped") {
    RetryPolicy p;
    CHECK(p.backoff(1).count() == 500);
    CHECK(p.backoff(2).count() == 1000);
    CHECK(p.backoff(4).count() == 4000);
    CHECK(p.backoff(5).count() == 8000);
    CHECK(p.backoff(12).count() == 8000);
  }

  TEST_CASE("endpoint URLs") {
    const auto u = parse_url("https://api.example.com/v1/chat/completions");
    REQUIRE(u);
    CHECK(u->scheme == "https");
    CHECK(u->host == "api.example.com");
    CHECK(u->port == 443);
    CHECK(u->path == "/v1/chat/completions");
    CHECK(parse_url("http://localhost:8080")->port == 8080);
    CHECK(parse_url("http://localhost:8080")->path == "/");
    CHECK_FALSE(parse_url("ftp://x/y"));
    CHECK_FALSE(parse_url("http://:80/"));
    CHECK_FALSE(parse_url("http://host:99999/"));
    ModelHandle h;
    h.model_id = "m";
    h.endpoint = "not a url";
    CHECK_THROWS_AS(h.validate(), ConfigError);
  }

  TEST_CASE("per-endpoint limiter caps in-flight requests") {
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
      const int now = ++in_flight;
      int seen = peak.load();
      while (now > seen && !peak.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(40));
      --in_flight;
      res.set_content(completion("ok"), "application/json");
    });
    auto limiter = std::make_shared<EndpointLimiter>(2);
    HttpChatModel model(handle_for(server), limiter);
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < 6; ++i) {
      threads.emplace_back([&] {
        if (model.complete(history()).content == "ok") ++ok;
      });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 6);
    CHECK(peak <= 2);
    CHECK(limiter->in_flight(model.handle().endpoint) == 0);
  }
}
