#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridbench/agents.hpp"
#include "gridbench/environment.hpp"
#include "gridbench/instance.hpp"

namespace gridbench {

struct RunLimits {
  int max_steps = 600;
  int max_output_tokens = 16384;
  /// The run fails once truncations exceed this count.
  int max_token_overflows = 3;
  int parallelism = 64;

  /// Throws ConfigError unless every field is positive.
  void validate() const;
};

enum class FailureReason { None, StepLimit, TokenOverflow, EndpointError };

std::string_view to_string(FailureReason reason);
FailureReason parse_failure_reason(std::string_view text);

struct EvalRecord {
  std::string domain;
  int h = 0;
  int b = 0;  // suite coordinate
  std::uint64_t seed = 0;  // instance seed
  std::uint64_t episode_seed = 0;
  std::string instance;  // path as given to the runner
  int reward = 0;
  double partial_credit = 0;
  int steps = 0;
  long completion_tokens = 0;
  double wall_time = 0;      // seconds
  double endpoint_time = 0;  // seconds spent inside agent turns
  double env_time = 0;       // seconds spent inside dispatch
  FailureReason failure_reason = FailureReason::None;
  int truncations = 0;
  int injected_failures = 0;
  std::string prompt_hash;
  std::string transcript;  // path, empty when not written
  std::string error;       // endpoint error text

  nlohmann::json to_json() const;
  static EvalRecord from_json(const nlohmann::json& j);
  /// Same outcome apart from timing fields.
  bool same_outcome(const EvalRecord& other) const;
};

struct EpisodeResult {
  EvalRecord record;
  nlohmann::json transcript;
};

using AgentFactory = std::function<std::unique_ptr<Agent>(const Instance& instance, std::uint64_t seed)>;

/// One episode. `label` names the instance in the record and transcript.
EpisodeResult run_episode(Agent& agent, const Instance& instance, const AnswerKey& key, const RunLimits& limits,
                          double fail_rate, std::uint64_t seed, std::string_view label = "");

/// Seed of the episode for `path` in a suite run with `suite_seed`. Uses the
/// last two path components so the suite directory can move.
std::uint64_t episode_seed(std::uint64_t suite_seed, const std::filesystem::path& path);

struct SuiteRunOptions {
  RunLimits limits;
  double fail_rate = 0.0;
  std::uint64_t seed = 42;
  /// When set, one transcript file per episode is written here.
  std::optional<std::filesystem::path> transcript_dir;
};

/// Runs every instance with up to limits.parallelism workers. Records come
/// back in input order. A failing episode yields a record; it never aborts
/// the suite.
std::vector<EvalRecord> run_suite(const std::vector<std::filesystem::path>& instances, const AgentFactory& factory,
                                  const SuiteRunOptions& options);

void write_records(const std::vector<EvalRecord>& records, const std::filesystem::path& path);
std::vector<EvalRecord> read_records(const std::filesystem::path& path);

}  // namespace gridbench
