#include "gridbench/chat_client.hpp"

#include <cstdlib>
#include <regex>
#include <thread>

#include "gridbench/errors.hpp"
#include "httplib.h"

namespace gridbench {

using json = nlohmann::json;

namespace {

const std::regex kUrl(R"(^(https?://[^/\s]+)(/[^\s]*)?$)");

}  // namespace

void EndpointConfig::validate() const {
  if (!std::regex_match(url, kUrl)) throw ConfigError("endpoint URL must look like http[s]://host[:port]/path");
  if (model.empty()) throw ConfigError("endpoint model name is empty");
  if (!api_key_env.empty() && std::getenv(api_key_env.c_str()) == nullptr) {
    throw ConfigError("environment variable " + api_key_env + " is not set");
  }
  if (max_output_tokens <= 0 || timeout_seconds <= 0 || attempts <= 0) {
    throw ConfigError("endpoint limits must be positive");
  }
}

ChatClient::ChatClient(EndpointConfig config) : config_(std::move(config)) {
  config_.validate();
  std::smatch m;
  std::regex_match(config_.url, m, kUrl);
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
  if (!config_.api_key_env.empty()) api_key_ = std::getenv(config_.api_key_env.c_str());
}

json ChatClient::complete(const json& body) const {
  std::string last_error;
  auto delay = config_.backoff;
  for (int attempt = 1; attempt <= config_.attempts; ++attempt) {
    httplib::Client cli(origin_);
    cli.set_connection_timeout(std::chrono::seconds(10));
    cli.set_read_timeout(std::chrono::seconds(config_.timeout_seconds));
    cli.set_write_timeout(std::chrono::seconds(60));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error&) {
        last_error = "response is not JSON";
      }
    }
    if (attempt < config_.attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  throw EndpointError("endpoint " + config_.url + " failed after " + std::to_string(config_.attempts) +
                      " attempts: " + last_error);
}

EndpointAgent::EndpointAgent(std::shared_ptr<const ChatClient> client, std::string system_prompt)
    : client_(std::move(client)),
      messages_(json::array({json{{"role", "system"}, {"content", std::move(system_prompt)}},
                             json{{"role", "user"}, {"content", "Fill every hidden cell, then call done."}}})) {}

AgentTurn EndpointAgent::act(const AgentView& view) {
  // Send back results for the calls made since the last turn.
  for (std::size_t i = answered_; i < view.transcript.size(); ++i) {
    const auto& entry = view.transcript[i];
    const json content = entry.result.ok ? entry.result.payload : json{{"error", entry.result.payload}};
    messages_.push_back(json{{"role", "tool"}, {"tool_call_id", entry.call.id}, {"content", content.dump()}});
  }
  answered_ = view.transcript.size();

  const auto& cfg = client_->config();
  json body{{"model", cfg.model},
            {"messages", messages_},
            {"tools", view.tools},
            {"temperature", cfg.temperature},
            {"max_tokens", cfg.max_output_tokens}};
  const json response = client_->complete(body);

  AgentTurn turn;
  if (!response.contains("choices") || !response["choices"].is_array() || response["choices"].empty()) {
    throw EndpointError("endpoint response has no choices");
  }
  const auto& choice = response["choices"][0];
  const json message = choice.value("message", json::object());
  if (auto usage = response.find("usage"); usage != response.end() && usage->is_object()) {
    turn.completion_tokens = usage->value("completion_tokens", 0);
  }
  turn.truncated = choice.value("finish_reason", json("")) == "length";
  if (message.contains("content") && message["content"].is_string()) turn.message = message["content"];

  if (turn.truncated) {
    messages_.push_back(json{{"role", "assistant"}, {"content", turn.message}});
    messages_.push_back(json{{"role", "user"}, {"content", "Your reply hit the output limit. Answer more briefly."}});
    return turn;
  }

  json assistant{{"role", "assistant"}, {"content", message.value("content", json(nullptr))}};
  if (auto calls = message.find("tool_calls"); calls != message.end() && calls->is_array() && !calls->empty()) {
    assistant["tool_calls"] = *calls;
    int n = 0;
    for (const auto& c : *calls) {
      ToolCall call;
      call.id = c.value("id", "call_" + std::to_string(view.transcript.size()) + "_" + std::to_string(n++));
      const auto fn = c.value("function", json::object());
      call.name = fn.value("name", "");
      const auto raw = fn.value("arguments", json("{}"));
      if (raw.is_string()) {
        call.arguments = json::parse(raw.get<std::string>(), nullptr, false);
        if (call.arguments.is_discarded()) call.arguments = raw;  // rejected in-band by the environment
      } else {
        call.arguments = raw;
      }
      turn.calls.push_back(std::move(call));
    }
  }
  messages_.push_back(std::move(assistant));
  return turn;
}

}  // namespace gridbench
