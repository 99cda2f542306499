#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gridbench/environment.hpp"
#include "gridbench/instance.hpp"
#include "gridbench/rng.hpp"

namespace gridbench {

/// What an agent sees before each turn. Only public data.
struct AgentView {
  const Instance& instance;
  const std::string& system_prompt;
  const nlohmann::json& tools;
  const std::vector<TranscriptEntry>& transcript;
};

struct AgentTurn {
  /// Executed in order, one step each. Empty with a non-truncated turn
  /// means the agent stopped talking.
  std::vector<ToolCall> calls;
  std::string message;
  int completion_tokens = 0;
  /// The response hit the output-token cap. Its calls are discarded.
  bool truncated = false;
};

class Agent {
 public:
  virtual ~Agent() = default;
  /// Throws EndpointError when the backing model cannot be reached.
  virtual AgentTurn act(const AgentView& view) = 0;
};

/// Scripted agents issue one call per turn and read the outcome of their
/// previous call from the tail of the transcript.
class ScriptedAgent : public Agent {
 public:
  AgentTurn act(const AgentView& view) final;

 protected:
  struct Pending {
    ToolCall call;
    int kind = 0;
    std::size_t slot = 0;
    std::string arg;
  };

  /// Called with the result of the call at the queue front.
  virtual void absorb(const Pending& done, const ToolResult& result) = 0;
  /// Refills the queue; leaving it empty ends the agent's turns.
  virtual void plan(const Instance& instance) = 0;
  /// Whether an injected failure should be repeated.
  virtual bool retries() const { return true; }

  std::deque<Pending> queue_;

 private:
  bool issued_ = false;
};

/// Reads both local constraint fields for every candidate, keeps the
/// locally valid ones, then walks their combinations with global checks.
class OracleAgent final : public ScriptedAgent {
 public:
  explicit OracleAgent(const Instance& instance);

 private:
  enum Kind { kRead, kSet, kProbe, kCheckGlobal, kDone };
  enum class Stage { Read, Filter, Settle, Check, Judge, Finished };

  void absorb(const Pending& done, const ToolResult& result) override;
  void plan(const Instance& instance) override;
  bool advance();

  Stage stage_ = Stage::Read;
  std::size_t slot_ = 0;
  std::vector<std::map<std::string, Item>> seen_;
  std::vector<bool> fallback_;
  std::vector<std::vector<std::string>> valid_;
  std::vector<std::size_t> choice_;
  std::vector<std::size_t> changed_;
  bool global_ok_ = false;
  bool global_spent_ = false;
};

/// Filters each slot with two attribute reads, places a uniformly random
/// locally valid candidate, and calls done. Never repeats a failed call.
class RandomValidAgent final : public ScriptedAgent {
 public:
  RandomValidAgent(const Instance& instance, std::uint64_t seed);

 private:
  enum Kind { kRead, kSet, kDone };

  void absorb(const Pending& done, const ToolResult& result) override;
  void plan(const Instance& instance) override;
  bool retries() const override { return false; }

  Rng rng_;
  std::size_t slot_ = 0;
  bool reading_ = true;
  bool finished_ = false;
  std::map<std::string, Item> seen_;
};

/// Asks for the grid state forever.
class LoopingAgent final : public Agent {
 public:
  AgentTurn act(const AgentView& view) override;
};

/// Random tool names and arguments, valid and invalid, drawn from the
/// catalog and the public instance.
class FuzzAgent final : public Agent {
 public:
  FuzzAgent(const Instance& instance, std::uint64_t seed);
  AgentTurn act(const AgentView& view) override;

 private:
  Rng rng_;
  std::vector<std::string> ids_;
};

/// Reports a truncated response `truncations` times, then behaves like
/// `inner`.
class TruncatingAgent final : public Agent {
 public:
  TruncatingAgent(std::unique_ptr<Agent> inner, int truncations, int tokens_per_turn);
  AgentTurn act(const AgentView& view) override;

 private:
  std::unique_ptr<Agent> inner_;
  int remaining_;
  int tokens_;
};

}  // namespace gridbench
