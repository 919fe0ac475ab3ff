#include "sbench/llm_gateway.hpp"

#include <algorithm>

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sbench {
namespace {

using json = nlohmann::json;

void check_history(std::span<const ChatMessage> history) {
  if (history.empty()) throw std::invalid_argument("chat history is empty");
  if (history.front().role != Role::system) {
    throw std::invalid_argument("chat history must start with a system message");
  }
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "system") return Role::system;
  if (text == "user") return Role::user;
  if (text == "assistant") return Role::assistant;
  return std::nullopt;
}

std::chrono::milliseconds RetryPolicy::backoff(int retry) const {
  auto delay = initial_backoff;
  for (int i = 1; i < retry && delay < max_backoff; ++i) delay *= 2;
  return std::min(delay, max_backoff);
}

std::optional<ParsedUrl> parse_url(std::string_view url_view) {
  const std::string url(url_view);
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  ParsedUrl out;
  out.scheme = std::string(url.substr(0, scheme_end));
  if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
  const std::string rest = url.substr(scheme_end + 3);
  const auto path_begin = rest.find('/');
  std::string authority = rest.substr(0, path_begin);
  out.path = path_begin == std::string::npos ? "/" : rest.substr(path_begin);
  if (authority.empty()) return std::nullopt;
  out.port = out.scheme == "https" ? 443 : 80;
  if (const auto colon = authority.rfind(':'); colon != std::string::npos) {
    const auto port_text = authority.substr(colon + 1);
    if (port_text.empty() || port_text.size() > 5) return std::nullopt;
    int port = 0;
    for (char c : port_text) {
      if (c < '0' || c > '9') return std::nullopt;
      port = port * 10 + (c - '0');
    }
    if (port == 0 || port > 65535) return std::nullopt;
    out.port = port;
    authority = authority.substr(0, colon);
  }
  const bool bad_char = std::any_of(authority.begin(), authority.end(), [](char c) {
    return c == ' ' || c == '/' || c == '?' || c == '#' || c == '@';
  });
  if (authority.empty() || bad_char) return std::nullopt;
  out.host = authority;
  return out;
}

void ModelHandle::validate() const {
  if (model_id.empty()) throw ConfigError("model_id must not be empty");
  if (!parse_url(endpoint)) throw ConfigError("model " + model_id + ": invalid endpoint URL '" + endpoint + "'");
  if (request_params.timeout_s <= 0) throw ConfigError("model " + model_id + ": timeout_s must be > 0");
  if (request_params.max_tokens <= 0) throw ConfigError("model " + model_id + ": max_tokens must be > 0");
  if (retry.max_retries < 0) throw ConfigError("model " + model_id + ": max_retries must be >= 0");
}

ScriptedModel::ScriptedModel(std::vector<std::string> script, std::string model_id)
    : script_(std::move(script)), model_id_(std::move(model_id)) {}

ChatMessage ScriptedModel::complete(std::span<const ChatMessage> history) {
  check_history(history);
  if (cursor_ >= script_.size()) {
    throw GatewayError(model_id_, static_cast<int>(cursor_) + 1, "script exhausted");
  }
  return {Role::assistant, script_[cursor_++]};
}

ScriptBook ScriptBook::parse(std::string_view json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  const auto it = doc.find("responses");
  if (!doc.is_object() || it == doc.end() || !it->is_object()) {
    throw ConfigError(origin + ": expected an object with a 'responses' object");
  }
  Table table;
  for (const auto& [strategy, by_task] : it->items()) {
    if (!by_task.is_object()) throw ConfigError(origin + ": responses for '" + strategy + "' must be an object");
    for (const auto& [task, list] : by_task.items()) {
      if (!list.is_array()) throw ConfigError(origin + ": responses for " + strategy + "/" + task + " must be a list");
      auto& out = table[strategy][task];
      for (const auto& text : list) {
        if (!text.is_string()) throw ConfigError(origin + ": response entries must be strings");
        out.push_back(text.get<std::string>());
      }
    }
  }
  return ScriptBook(std::move(table));
}

ScriptBook ScriptBook::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read script " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::vector<std::string> ScriptBook::lookup(std::string_view strategy, std::string_view task_id) const {
  for (const auto& s : {std::string(strategy), std::string("*")}) {
    const auto sit = responses_.find(s);
    if (sit == responses_.end()) continue;
    for (const auto& t : {std::string(task_id), std::string("*")}) {
      const auto tit = sit->second.find(t);
      if (tit != sit->second.end()) return tit->second;
    }
  }
  return {};
}

ScriptedModel ScriptBook::model_for(std::string_view strategy, std::string_view task_id, std::string model_id) const {
  return ScriptedModel(lookup(strategy, task_id), std::move(model_id));
}

EndpointLimiter::EndpointLimiter(int per_endpoint_cap) : cap_(per_endpoint_cap) {
  if (cap_ < 1) throw ConfigError("per-endpoint request cap must be >= 1");
}

EndpointLimiter::Permit EndpointLimiter::acquire(const std::string& endpoint) {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_[endpoint] < cap_; });
  ++in_flight_[endpoint];
  return Permit(this, endpoint);
}

int EndpointLimiter::in_flight(const std::string& endpoint) const {
  std::lock_guard lock(mu_);
  const auto it = in_flight_.find(endpoint);
  return it == in_flight_.end() ? 0 : it->second;
}

EndpointLimiter::Permit::Permit(EndpointLimiter* owner, std::string endpoint)
    : owner_(owner), endpoint_(std::move(endpoint)) {}

EndpointLimiter::Permit::Permit(Permit&& other) noexcept
    : owner_(std::exchange(other.owner_, nullptr)), endpoint_(std::move(other.endpoint_)) {}

EndpointLimiter::Permit& EndpointLimiter::Permit::operator=(Permit&& other) noexcept {
  if (this != &other) {
    release();
    owner_ = std::exchange(other.owner_, nullptr);
    endpoint_ = std::move(other.endpoint_);
  }
  return *this;
}

EndpointLimiter::Permit::~Permit() { release(); }

void EndpointLimiter::Permit::release() {
  if (owner_ == nullptr) return;
  {
    std::lock_guard lock(owner_->mu_);
    --owner_->in_flight_[endpoint_];
  }
  owner_->cv_.notify_all();
  owner_ = nullptr;
}

std::string build_request_body(const ModelHandle& handle, std::span<const ChatMessage> history) {
  json messages = json::array();
  for (const auto& m : history) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json body = {
      {"model", handle.model_id},
      {"messages", std::move(messages)},
      {"temperature", handle.request_params.temperature},
      {"max_tokens", handle.request_params.max_tokens},
  };
  if (handle.request_params.seed) body["seed"] = *handle.request_params.seed;
  return body.dump();
}

std::string parse_response_content(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed response body: ") + e.what());
  }
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error("malformed response body: content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed response body: ") + e.what());
  }
}

HttpChatModel::HttpChatModel(ModelHandle handle, std::shared_ptr<EndpointLimiter> limiter)
    : handle_(std::move(handle)), limiter_(std::move(limiter)), sleep_([](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
      }) {
  handle_.validate();
  url_ = *parse_url(handle_.endpoint);
}

std::string HttpChatModel::post_once(const std::string& body) {
  const std::string base = url_.scheme + "://" + url_.host + ":" + std::to_string(url_.port);
  httplib::Client client(base);
  const auto timeout = std::chrono::seconds(handle_.request_params.timeout_s);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!handle_.auth_ref.empty()) {
    const char* token = std::getenv(handle_.auth_ref.c_str());
    if (token == nullptr) throw Error("credential environment variable " + handle_.auth_ref + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  auto result = client.Post(url_.path, headers, body, "application/json");
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error("timeout or read failure: " + httplib::to_string(err));
    }
    throw Error("transport failure: " + httplib::to_string(err));
  }
  if (result->status < 200 || result->status >= 300) {
    throw Error("HTTP status " + std::to_string(result->status) + ": " + result->body.substr(0, 512));
  }
  return parse_response_content(result->body);
}

ChatMessage HttpChatModel::complete(std::span<const ChatMessage> history) {
  check_history(history);
  const auto body = build_request_body(handle_, history);
  const int attempts = handle_.retry.max_retries + 1;
  for (int attempt = 1;; ++attempt) {
    try {
      EndpointLimiter::Permit permit;
      if (limiter_) permit = limiter_->acquire(handle_.endpoint);
      return {Role::assistant, post_once(body)};
    } catch (const Error& e) {
      if (attempt >= attempts) throw GatewayError(handle_.model_id, attempt, e.what());
    }
    sleep_(handle_.retry.backoff(attempt));
  }
}

}  // namespace sbench
