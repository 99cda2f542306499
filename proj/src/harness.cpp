#include "gridbench/harness.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "gridbench/errors.hpp"
#include "gridbench/prompt.hpp"

namespace gridbench {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

void RunLimits::validate() const {
  if (max_steps <= 0 || max_output_tokens <= 0 || max_token_overflows <= 0 || parallelism <= 0) {
    throw ConfigError("run limits must all be positive");
  }
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::None:
      return "none";
    case FailureReason::StepLimit:
      return "step_limit";
    case FailureReason::TokenOverflow:
      return "token_overflow";
    case FailureReason::EndpointError:
      return "endpoint_error";
  }
  return "none";
}

FailureReason parse_failure_reason(std::string_view text) {
  for (auto r : {FailureReason::None, FailureReason::StepLimit, FailureReason::TokenOverflow,
                 FailureReason::EndpointError}) {
    if (to_string(r) == text) return r;
  }
  throw ParseError(0, "unknown failure reason '" + std::string(text) + "'");
}

json EvalRecord::to_json() const {
  return json{{"domain", domain},
              {"h", h},
              {"b", b},
              {"seed", seed},
              {"episode_seed", episode_seed},
              {"instance", instance},
              {"reward", reward},
              {"partial_credit", partial_credit},
              {"steps", steps},
              {"completion_tokens", completion_tokens},
              {"wall_time", wall_time},
              {"endpoint_time", endpoint_time},
              {"env_time", env_time},
              {"failure_reason", to_string(failure_reason)},
              {"truncations", truncations},
              {"injected_failures", injected_failures},
              {"prompt_hash", prompt_hash},
              {"transcript", transcript},
              {"error", error}};
}

EvalRecord EvalRecord::from_json(const json& j) {
  EvalRecord r;
  try {
    r.domain = j.at("domain").get<std::string>();
    r.h = j.at("h").get<int>();
    r.b = j.at("b").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.episode_seed = j.value("episode_seed", std::uint64_t{0});
    r.instance = j.value("instance", "");
    r.reward = j.at("reward").get<int>();
    r.partial_credit = j.value("partial_credit", 0.0);
    r.steps = j.at("steps").get<int>();
    r.completion_tokens = j.value("completion_tokens", 0L);
    r.wall_time = j.value("wall_time", 0.0);
    r.endpoint_time = j.value("endpoint_time", 0.0);
    r.env_time = j.value("env_time", 0.0);
    r.failure_reason = parse_failure_reason(j.value("failure_reason", "none"));
    r.truncations = j.value("truncations", 0);
    r.injected_failures = j.value("injected_failures", 0);
    r.prompt_hash = j.value("prompt_hash", "");
    r.transcript = j.value("transcript", "");
    r.error = j.value("error", "");
  } catch (const json::exception& e) {
    throw SchemaError("record", std::string("bad record: ") + e.what());
  }
  return r;
}

bool EvalRecord::same_outcome(const EvalRecord& o) const {
  return domain == o.domain && h == o.h && b == o.b && seed == o.seed && episode_seed == o.episode_seed &&
         instance == o.instance && reward == o.reward && partial_credit == o.partial_credit && steps == o.steps &&
         completion_tokens == o.completion_tokens && failure_reason == o.failure_reason &&
         truncations == o.truncations && injected_failures == o.injected_failures && prompt_hash == o.prompt_hash;
}

EpisodeResult run_episode(Agent& agent, const Instance& instance, const AnswerKey& key, const RunLimits& limits,
                          double fail_rate, std::uint64_t seed, std::string_view label) {
  const auto start = Clock::now();
  Episode episode(instance, fail_rate, seed);
  const std::string prompt = system_prompt(instance);
  const json tools = tool_catalog(instance.domain);

  EvalRecord rec;
  rec.domain = instance.domain;
  rec.h = instance.h;
  rec.b = instance.b_requested;
  rec.seed = instance.seed;
  rec.episode_seed = seed;
  rec.instance = std::string(label);
  rec.prompt_hash = prompt_hash(instance.domain);

  while (!episode.done() && episode.steps() < limits.max_steps) {
    const AgentView view{instance, prompt, tools, episode.transcript()};
    AgentTurn turn;
    const auto t0 = Clock::now();
    try {
      turn = agent.act(view);
    } catch (const EndpointError& e) {
      rec.endpoint_time += seconds_since(t0);
      rec.failure_reason = FailureReason::EndpointError;
      rec.error = e.what();
      break;
    }
    rec.endpoint_time += seconds_since(t0);
    rec.completion_tokens += turn.completion_tokens;

    if (turn.truncated || turn.completion_tokens > limits.max_output_tokens) {
      if (++rec.truncations > limits.max_token_overflows) {
        rec.failure_reason = FailureReason::TokenOverflow;
        break;
      }
      continue;
    }
    if (turn.calls.empty()) break;
    for (const auto& call : turn.calls) {
      if (episode.done() || episode.steps() >= limits.max_steps) break;
      const auto t1 = Clock::now();
      episode.dispatch(call);
      rec.env_time += seconds_since(t1);
    }
  }
  if (rec.failure_reason == FailureReason::None && !episode.done() && episode.steps() >= limits.max_steps) {
    rec.failure_reason = FailureReason::StepLimit;
  }

  const auto score = score_episode(episode, key);
  const bool hard_fail =
      rec.failure_reason == FailureReason::TokenOverflow || rec.failure_reason == FailureReason::EndpointError;
  rec.reward = hard_fail ? 0 : score.reward;
  rec.partial_credit = score.partial_credit;
  rec.steps = episode.steps();
  rec.injected_failures = episode.injected_failures();
  rec.wall_time = seconds_since(start);

  json calls = json::array();
  int step = 0;
  for (const auto& e : episode.transcript()) {
    calls.push_back(json{{"step", ++step},
                         {"name", e.call.name},
                         {"arguments", e.call.arguments},
                         {"ok", e.result.ok},
                         {"payload", e.result.payload}});
  }
  json transcript{{"instance_path", rec.instance},
                  {"seed", seed},
                  {"p", fail_rate},
                  {"calls", std::move(calls)},
                  {"reward", rec.reward},
                  {"steps", rec.steps},
                  {"failure_reason", to_string(rec.failure_reason)}};
  return EpisodeResult{std::move(rec), std::move(transcript)};
}

std::uint64_t episode_seed(std::uint64_t suite_seed, const std::filesystem::path& path) {
  const auto tail = path.parent_path().filename() / path.filename();
  return Rng::derive_seed(suite_seed, "episode:" + tail.generic_string());
}

std::vector<EvalRecord> run_suite(const std::vector<std::filesystem::path>& instances, const AgentFactory& factory,
                                  const SuiteRunOptions& options) {
  options.limits.validate();
  if (!(options.fail_rate >= 0.0 && options.fail_rate <= 1.0)) throw ConfigError("failure rate must be in [0, 1]");
  if (options.transcript_dir) std::filesystem::create_directories(*options.transcript_dir);

  std::vector<EvalRecord> records(instances.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      const auto& path = instances[i];
      const auto seed = episode_seed(options.seed, path);
      EvalRecord& rec = records[i];
      try {
        const auto [instance, key] = read_instance(path);
        auto agent = factory(instance, Rng::derive_seed(seed, "agent"));
        auto result = run_episode(*agent, instance, key, options.limits, options.fail_rate, seed, path.generic_string());
        if (options.transcript_dir) {
          const auto out = *options.transcript_dir /
                           (path.parent_path().filename().string() + "__" + path.stem().string() + ".transcript.json");
          write_text_file(out, result.transcript.dump(2) + "\n");
          result.record.transcript = out.generic_string();
        }
        rec = std::move(result.record);
      } catch (const std::exception& e) {
        // Unreadable instance or agent construction failure.
        rec = EvalRecord{};
        rec.instance = path.generic_string();
        rec.episode_seed = seed;
        rec.failure_reason = FailureReason::EndpointError;
        rec.error = e.what();
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(options.limits.parallelism), instances.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return records;
}

void write_records(const std::vector<EvalRecord>& records, const std::filesystem::path& path) {
  std::string text;
  for (const auto& r : records) text += r.to_json().dump() + "\n";
  write_text_file(path, text);
}

std::vector<EvalRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open records file " + path.string());
  std::vector<EvalRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(n, path.string() + ": line " + std::to_string(n) + " is not JSON");
    out.push_back(EvalRecord::from_json(j));
  }
  return out;
}

}  // namespace gridbench
