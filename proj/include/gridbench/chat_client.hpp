#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "gridbench/agents.hpp"
#include "json.hpp"

namespace gridbench {

struct EndpointConfig {
  /// Full URL of the chat-completions route, e.g.
  /// http://localhost:8000/v1/chat/completions
  std::string url;
  std::string model;
  /// Name of the environment variable holding the API key; empty for none.
  std::string api_key_env;
  double temperature = 0.0;
  int max_output_tokens = 16384;
  int timeout_seconds = 600;
  int attempts = 3;
  std::chrono::milliseconds backoff{500};

  /// Throws ConfigError on a malformed URL, missing model, or unset key
  /// variable.
  void validate() const;
};

/// Thin JSON-over-HTTP client. Safe to share across threads.
class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config);

  /// POSTs `body` and returns the parsed response. Retries transport errors
  /// and non-2xx statuses with exponential backoff, then throws
  /// EndpointError.
  nlohmann::json complete(const nlohmann::json& body) const;
  const EndpointConfig& config() const noexcept { return config_; }

 private:
  EndpointConfig config_;
  std::string origin_;
  std::string path_;
  std::string api_key_;
};

/// Drives a function-calling model through the episode.
class EndpointAgent final : public Agent {
 public:
  EndpointAgent(std::shared_ptr<const ChatClient> client, std::string system_prompt);
  AgentTurn act(const AgentView& view) override;

 private:
  std::shared_ptr<const ChatClient> client_;
  nlohmann::json messages_;
  std::size_t answered_ = 0;  // transcript entries already sent back
};

}  // namespace gridbench
