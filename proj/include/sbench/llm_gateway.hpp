#pragma once

// Chat interface to model backends: an HTTP chat-completion client and a
// scripted model for offline runs.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbench/error.hpp"

namespace sbench {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct ChatMessage {
  Role role = Role::user;
  std::string content;  // never trimmed or re-encoded

  bool operator==(const ChatMessage&) const = default;
};

struct RequestParams {
  double temperature = 0.2;
  int max_tokens = 4096;
  int timeout_s = 120;
  std::optional<std::int64_t> seed;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};

  /// Delay before retry number `retry` (1-based): initial * 2^(retry-1), capped.
  std::chrono::milliseconds backoff(int retry) const;
};

struct ModelHandle {
  std::string model_id;
  std::string endpoint;  // full chat-completions URL
  std::string auth_ref;  // environment variable holding the bearer token; empty for none
  RequestParams request_params;
  RetryPolicy retry;

  /// Throws ConfigError when the endpoint is not a URL or timeout_s <= 0.
  void validate() const;
};

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;
};

std::optional<ParsedUrl> parse_url(std::string_view url);

/// Failure of a model request after retries are exhausted (or immediately for
/// scripted models).
class GatewayError : public Error {
 public:
  GatewayError(std::string model_id, int attempt, const std::string& what)
      : Error("model " + model_id + ", attempt " + std::to_string(attempt) + ": " + what),
        model_id_(std::move(model_id)),
        attempt_(attempt) {}

  const std::string& model_id() const { return model_id_; }
  int attempt() const { return attempt_; }

 private:
  std::string model_id_;
  int attempt_;
};

class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual const std::string& model_id() const = 0;
  /// One assistant turn for the full history. The first message must be the system role.
  virtual ChatMessage complete(std::span<const ChatMessage> history) = 0;
};

/// Replays canned assistant responses in order.
class ScriptedModel final : public ChatModel {
 public:
  explicit ScriptedModel(std::vector<std::string> script, std::string model_id = "scripted");

  const std::string& model_id() const override { return model_id_; }
  ChatMessage complete(std::span<const ChatMessage> history) override;

  std::size_t cursor() const { return cursor_; }
  std::size_t size() const { return script_.size(); }

 private:
  std::vector<std::string> script_;
  std::size_t cursor_ = 0;
  std::string model_id_;
};

/// Scripted responses keyed by strategy name and task id, each level with a
/// "*" fallback. Every run_task gets a fresh ScriptedModel from the book, so
/// results do not depend on scheduling order or on resumption.
class ScriptBook {
 public:
  using Table = std::map<std::string, std::map<std::string, std::vector<std::string>>>;

  ScriptBook() = default;
  explicit ScriptBook(Table responses) : responses_(std::move(responses)) {}

  /// Reads {"responses": {strategy: {task_id: [text, ...]}}}. Throws ConfigError.
  static ScriptBook load(const std::string& path);
  static ScriptBook parse(std::string_view json_text, const std::string& origin = "script");

  /// Responses for the pair, or an empty script when nothing matches.
  std::vector<std::string> lookup(std::string_view strategy, std::string_view task_id) const;
  ScriptedModel model_for(std::string_view strategy, std::string_view task_id, std::string model_id) const;

 private:
  Table responses_;
};

/// Caps concurrent in-flight requests per endpoint. Requests hold a Permit for
/// their duration.
class EndpointLimiter {
 public:
  explicit EndpointLimiter(int per_endpoint_cap = 4);

  class Permit {
   public:
    Permit() = default;
    Permit(Permit&& other) noexcept;
    Permit& operator=(Permit&& other) noexcept;
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit();

   private:
    friend class EndpointLimiter;
    Permit(EndpointLimiter* owner, std::string endpoint);
    void release();
    EndpointLimiter* owner_ = nullptr;
    std::string endpoint_;
  };

  Permit acquire(const std::string& endpoint);
  int in_flight(const std::string& endpoint) const;
  int cap() const { return cap_; }

 private:
  int cap_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, int> in_flight_;
};

/// JSON request body for a chat-completion call.
std::string build_request_body(const ModelHandle& handle, std::span<const ChatMessage> history);

/// choices[0].message.content of a response body. Throws sbench::Error when malformed.
std::string parse_response_content(std::string_view body);

/// Chat-completion client over HTTP(S).
class HttpChatModel final : public ChatModel {
 public:
  using SleepFn = std::function<void(std::chrono::milliseconds)>;

  HttpChatModel(ModelHandle handle, std::shared_ptr<EndpointLimiter> limiter = nullptr);

  const std::string& model_id() const override { return handle_.model_id; }
  ChatMessage complete(std::span<const ChatMessage> history) override;

  const ModelHandle& handle() const { return handle_; }
  /// Replaces the backoff sleep; tests use this to avoid real delays.
  void set_sleep(SleepFn sleep) { sleep_ = std::move(sleep); }

 private:
  std::string post_once(const std::string& body);

  ModelHandle handle_;
  ParsedUrl url_;
  std::shared_ptr<EndpointLimiter> limiter_;
  SleepFn sleep_;
};

}  // namespace sbench
