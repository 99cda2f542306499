#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gridbench/instance.hpp"
#include "gridbench/rng.hpp"
#include "json.hpp"

namespace gridbench {

struct ToolCall {
  std::string id;  // echoed back to chat endpoints; may be empty
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();
};

struct ToolResult {
  bool ok = false;
  nlohmann::json payload;  // error text when !ok
};

struct TranscriptEntry {
  ToolCall call;
  ToolResult result;
  bool injected = false;
};

inline constexpr std::string_view kInjectedFailure = "tool call failed: service unavailable";
inline constexpr std::string_view kBudgetExhausted = "budget exhausted";

/// The eleven tool names for a domain: six common tools, then five
/// domain-specific ones.
std::vector<std::string> tool_names(std::string_view domain);

/// Function declarations in the chat-completions "tools" shape.
nlohmann::json tool_catalog(std::string_view domain);

/// One agent run over one instance. Strictly sequential; not thread-safe.
///
/// Every dispatch appends one transcript entry and counts one step, whether
/// it succeeds, fails on bad input, or is rejected by failure injection.
/// Injected failures never run the tool and never touch a budget.
class Episode {
 public:
  /// `instance` must outlive the episode.
  Episode(const Instance& instance, double fail_rate, std::uint64_t seed);

  ToolResult dispatch(const ToolCall& call);

  const Instance& instance() const noexcept { return *instance_; }
  bool done() const noexcept { return done_; }
  int steps() const noexcept { return static_cast<int>(transcript_.size()); }
  int injected_failures() const noexcept { return injected_; }
  double fail_rate() const noexcept { return fail_rate_; }
  const GridAssignment& grid() const noexcept { return grid_; }
  /// Throws PreconditionError for a cell that is not hidden.
  int query_budget(Cell cell) const;
  int global_check_budget() const noexcept { return global_budget_; }
  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }

 private:
  ToolResult execute(const ToolCall& call);
  std::size_t hidden_index(Cell cell) const;

  ToolResult set_slot(const nlohmann::json& args);
  ToolResult grid_state() const;
  ToolResult slot_id(const nlohmann::json& args) const;
  ToolResult slot_budget(const nlohmann::json& args) const;
  ToolResult query_candidates(const nlohmann::json& args);
  ToolResult item_info(const nlohmann::json& args) const;
  ToolResult item_attributes(const nlohmann::json& args);
  ToolResult check_slot(const nlohmann::json& args) const;
  ToolResult check_global();

  const Instance* instance_;
  double fail_rate_;
  Rng rng_;
  GridAssignment grid_;
  std::vector<int> slot_budgets_;  // parallel to instance.hidden
  int global_budget_;
  bool done_ = false;
  int injected_ = 0;
  std::vector<TranscriptEntry> transcript_;
  std::unordered_map<std::string, std::vector<std::size_t>> candidate_slots_;
  std::unordered_map<std::string, std::size_t> prefilled_ids_;
  std::vector<std::string> names_;  // tool_names(domain)
};

struct EpisodeScore {
  int reward = 0;              // 1 iff every hidden slot holds its truth item
  double partial_credit = 0;   // fraction of hidden slots holding their truth item
};

EpisodeScore score_episode(const Episode& episode, const AnswerKey& key);

}  // namespace gridbench
