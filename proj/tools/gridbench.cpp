#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridbench/agents.hpp"
#include "gridbench/chat_client.hpp"
#include "gridbench/errors.hpp"
#include "gridbench/harness.hpp"
#include "gridbench/prompt.hpp"
#include "gridbench/report.hpp"
#include "gridbench/suite.hpp"

namespace fs = std::filesystem;
using namespace gridbench;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfig = 2;

struct Options {
  std::uint64_t seed = 42;
  std::string out;

  // generate
  std::vector<std::string> domains;
  std::vector<int> hs;
  std::vector<int> bs;
  int k = 25;

  // validate / run
  std::string dir;

  // run
  std::string agent = "oracle";
  double fail_rate = 0.0;
  RunLimits limits;
  EndpointConfig endpoint;

  // report
  std::vector<std::string> records;
};

fs::path out_or(const Options& o, const char* fallback) { return o.out.empty() ? fs::path(fallback) : fs::path(o.out); }

int cmd_generate(const Options& o) {
  SuiteConfig cfg;
  cfg.seed = o.seed;
  cfg.k = o.k;
  if (!o.domains.empty()) cfg.domains = o.domains;
  if (!o.hs.empty()) cfg.hs = o.hs;
  if (!o.bs.empty()) cfg.bs = o.bs;
  const auto out = out_or(o, "suite");
  const auto manifest = generate_suite(cfg, out);
  for (const auto& f : manifest.failures) std::cerr << "generation failed: " << f << "\n";
  std::cout << "wrote " << manifest.entries.size() << " instances to " << out.string() << "\n";
  return manifest.ok() ? kOk : kFailed;
}

int cmd_validate(const Options& o) {
  const auto result = validate_dir(o.dir);
  for (const auto& f : result.failures) std::cerr << f << "\n";
  if (result.checked == 0) std::cerr << "no instances found under " << o.dir << "\n";
  std::cout << result.checked << " instances checked, " << result.failures.size() << " failures\n";
  return result.ok() ? kOk : kFailed;
}

bool keep(const Instance& inst, const Options& o) {
  auto has = [](const auto& v, const auto& x) { return v.empty() || std::find(v.begin(), v.end(), x) != v.end(); };
  return has(o.domains, inst.domain) && has(o.hs, inst.h) && has(o.bs, inst.b_requested);
}

int cmd_run(const Options& o) {
  o.limits.validate();
  if (!(o.fail_rate >= 0.0 && o.fail_rate <= 1.0)) throw ConfigError("--fail-rate must be in [0, 1]");

  AgentFactory factory;
  if (o.agent == "oracle") {
    factory = [](const Instance& inst, std::uint64_t) { return std::make_unique<OracleAgent>(inst); };
  } else if (o.agent == "random") {
    factory = [](const Instance& inst, std::uint64_t seed) { return std::make_unique<RandomValidAgent>(inst, seed); };
  } else if (o.agent == "endpoint") {
    auto cfg = o.endpoint;
    cfg.max_output_tokens = o.limits.max_output_tokens;
    auto client = std::make_shared<const ChatClient>(cfg);  // validates before any episode
    factory = [client](const Instance& inst, std::uint64_t) {
      return std::make_unique<EndpointAgent>(client, system_prompt(inst));
    };
  } else {
    throw ConfigError("--agent must be oracle, random or endpoint");
  }

  std::vector<fs::path> paths;
  for (const auto& p : find_instances(o.dir)) {
    if (keep(read_public_instance(p), o)) paths.push_back(p);
  }
  if (paths.empty()) throw ConfigError("no instances under " + o.dir + " match the filters");

  const auto out = out_or(o, "runs");
  SuiteRunOptions run;
  run.limits = o.limits;
  run.fail_rate = o.fail_rate;
  run.seed = o.seed;
  run.transcript_dir = out / "transcripts";
  const auto records = run_suite(paths, factory, run);
  write_records(records, out / "records.jsonl");

  const auto report = aggregate(records);
  std::cout << records.size() << " episodes, mean reward " << percent(report.overall.mean()) << "%, records in "
            << (out / "records.jsonl").string() << "\n";
  return kOk;
}

int cmd_report(const Options& o) {
  std::vector<EvalRecord> all;
  for (const auto& f : o.records) {
    auto part = read_records(f);
    all.insert(all.end(), part.begin(), part.end());
  }
  const auto report = aggregate(all);
  const auto out = out_or(o, "report");
  write_report(report, out);
  std::cout << by_domain_csv(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid planning benchmark: generate, validate, run and report."};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--out", o.out, "Output directory");

  auto* gen = app.add_subcommand("generate", "Generate an instance suite");
  gen->add_option("--domain", o.domains, "Domains (default: all)");
  gen->add_option("--h", o.hs, "Hidden slot counts");
  gen->add_option("--b", o.bs, "Decoy budgets");
  gen->add_option("--k", o.k, "Candidates per hidden slot")->capture_default_str();

  auto* val = app.add_subcommand("validate", "Validate every instance and key in a directory");
  val->add_option("dir", o.dir, "Suite directory")->required();

  auto* run = app.add_subcommand("run", "Run an agent over a suite");
  run->add_option("dir", o.dir, "Suite directory")->required();
  run->add_option("--agent", o.agent, "oracle, random or endpoint")->capture_default_str();
  run->add_option("--fail-rate,--p", o.fail_rate, "Tool failure probability")->capture_default_str();
  run->add_option("--domain", o.domains, "Only these domains");
  run->add_option("--h", o.hs, "Only these h values");
  run->add_option("--b", o.bs, "Only these b values");
  run->add_option("--max-steps", o.limits.max_steps)->capture_default_str();
  run->add_option("--max-output-tokens", o.limits.max_output_tokens)->capture_default_str();
  run->add_option("--max-token-overflows", o.limits.max_token_overflows)->capture_default_str();
  run->add_option("--parallelism", o.limits.parallelism)->capture_default_str();
  run->add_option("--endpoint-url", o.endpoint.url, "Chat-completions URL");
  run->add_option("--model", o.endpoint.model, "Model name");
  run->add_option("--api-key-env", o.endpoint.api_key_env, "Environment variable holding the API key");
  run->add_option("--temperature", o.endpoint.temperature)->capture_default_str();
  run->add_option("--timeout", o.endpoint.timeout_seconds, "Per-request timeout in seconds")->capture_default_str();

  auto* rep = app.add_subcommand("report", "Aggregate records into CSV tables");
  rep->add_option("records", o.records, "records.jsonl files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*val) return cmd_validate(o);
    if (*run) return cmd_run(o);
    return cmd_report(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
