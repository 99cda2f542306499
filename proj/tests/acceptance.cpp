// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gridbench/agents.hpp"
#include "gridbench/environment.hpp"
#include "gridbench/generator.hpp"
#include "gridbench/harness.hpp"
#include "gridbench/prompt.hpp"
#include "gridbench/suite.hpp"
#include "oracles.hpp"

using namespace gridbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome fail(std::string why) { return {false, std::move(why)}; }

// Shared default suite, generated once by criterion 1.
fs::path g_root;
fs::path g_suite;
double g_gen_seconds = 0;

std::vector<fs::path> suite_instances(const std::function<bool(const Instance&)>& keep) {
  std::vector<fs::path> out;
  for (const auto& p : find_instances(g_suite)) {
    if (keep(read_public_instance(p))) out.push_back(p);
  }
  return out;
}

Outcome suite_shape() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto manifest = generate_suite(SuiteConfig{}, g_suite);
  g_gen_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!manifest.ok()) return fail("generation failures: " + manifest.failures.front());
  const auto check = validate_dir(g_suite);
  if (!check.ok()) return fail(check.failures.empty() ? "nothing checked" : check.failures.front());
  if (check.checked != 324) return fail("validated " + std::to_string(check.checked) + " instances");
  std::map<std::tuple<std::string, int, int>, int> seen;
  for (const auto& p : find_instances(g_suite)) {
    const auto inst = read_public_instance(p);
    if (inst.rows * inst.cols != 35) return fail(p.string() + ": not 35 cells");
    if (inst.prefilled.size() + inst.hidden.size() != 35) return fail(p.string() + ": cells do not cover the grid");
    for (const auto& s : inst.hidden) {
      if (s.candidates.size() != 25) return fail(p.string() + ": slot without 25 candidates");
    }
    ++seen[{inst.domain, inst.h, inst.b_requested}];
  }
  if (seen.size() != 324) return fail(std::to_string(seen.size()) + " distinct (domain, h, b) cells");
  if (g_gen_seconds >= 600) return fail(fmt("generation took %.1f s", g_gen_seconds));
  return {true, fmt("324 instances validated, generated in %.1f s", g_gen_seconds)};
}

Outcome decoy_guarantee() {
  const auto& pool_cfg = GenConfig{};
  std::map<std::string, std::vector<Item>> pools;
  int instances = 0;
  long decoys = 0;
  long violations = 0;
  std::uint64_t seed = 1000;
  for (const auto& domain : list_domains()) {
    auto pc = pool_cfg;
    pc.domain = domain;
    pools[domain] = pool_for(pc);
    for (int h : {2, 3, 5}) {
      for (int b : {1, 3, 6}) {
        for (int rep = 0; rep < 2; ++rep) {
          auto cfg = fixtures::small_config(seed++, h, b, 10);
          cfg.domain = domain;
          const auto [inst, key] = generate(cfg, pools[domain]);
          ++instances;
          const auto truth = key.truth_grid(inst);
          for (std::size_t i = 0; i < key.allocations.size(); ++i) {
            const auto cell = key.allocations[i].cell;
            const auto priors = oracle::priors_from_key(key, i);
            for (const auto& d : key.decoys.at(cell)) {
              ++decoys;
              if (!oracle::hard_check(truth, inst.items, inst.global_constraints, priors, cell, d)) ++violations;
            }
          }
        }
      }
    }
  }
  if (instances < 100) return fail("only " + std::to_string(instances) + " instances");
  const std::string detail = std::to_string(violations) + " violations over " + std::to_string(decoys) +
                             " decoys in " + std::to_string(instances) + " instances";
  return {violations == 0, detail};
}

Outcome uniqueness() {
  int unique = 0;
  int total = 0;
  std::string first_bad;
  Rng pick(7);
  for (int i = 0; i < 100; ++i) {
    const int h = 1 + i % 3;
    const int k = 6;
    const int b = static_cast<int>(pick.below(static_cast<std::uint64_t>(h * (k - 1) + 1)));
    auto cfg = fixtures::small_config(5000 + static_cast<std::uint64_t>(i), h, b, k);
    cfg.domain = list_domains()[static_cast<std::size_t>(i) % list_domains().size()];
    const auto [inst, key] = generate(cfg);
    const auto sols = oracle::solutions(inst);
    ++total;
    if (sols.size() == 1 && sols.front() == key.truth) {
      ++unique;
    } else if (first_bad.empty()) {
      first_bad = "; seed " + std::to_string(cfg.seed) + " has " + std::to_string(sols.size()) + " solutions";
    }
  }
  return {unique == 100, std::to_string(unique) + "/" + std::to_string(total) + " unique" + first_bad};
}

Outcome horizon_scaling() {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : suite_instances([](const Instance& i) { return i.b_requested == 0; })) {
    const auto [inst, key] = read_instance(p);
    OracleAgent agent(inst);
    const auto r = run_episode(agent, inst, key, RunLimits{}, 0.0, 1).record;
    xs.push_back(inst.h);
    ys.push_back(r.steps);
  }
  if (xs.size() != 36) return fail(std::to_string(xs.size()) + " B=0 instances");
  const double n = static_cast<double>(xs.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double c1 = sxy / sxx;
  const double c0 = my - c1 * mx;
  const double r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return {r2 >= 0.999, fmt("steps = %.3f + %.3f h, R^2 = %.5f", c0, c1, r2)};
}

Outcome difficulty_control() {
  const int episodes = 10000;
  std::ostringstream detail;
  bool pass = true;
  double prev = 2.0;
  for (int b : SuiteConfig{}.bs) {
    const auto path = g_suite / instance_relpath("course", 15, b);
    const auto [inst, key] = read_instance(path);
    const double exact = oracle::product_formula(key);
    int wins = 0;
    for (int e = 0; e < episodes; ++e) {
      const auto seed = Rng::derive_seed(static_cast<std::uint64_t>(b), "random:" + std::to_string(e));
      RandomValidAgent agent(inst, seed);
      wins += run_episode(agent, inst, key, RunLimits{}, 0.0, seed).record.reward;
    }
    const double mean = static_cast<double>(wins) / episodes;
    const double se = std::sqrt(exact * (1 - exact) / episodes);
    const bool within = std::abs(mean - exact) <= 3 * se;
    const bool monotone = mean <= prev;
    pass = pass && within && monotone;
    prev = mean;
    detail << " b=" << b << ":" << fmt("%.4f/%.4f", mean, exact) << (within ? "" : "(off)")
           << (monotone ? "" : "(rise)");
  }
  return {pass, "mean/exact" + detail.str()};
}

Outcome oracle_ceiling() {
  int solved = 0;
  int total = 0;
  int max_steps = 0;
  for (const auto& p : suite_instances([](const Instance& i) { return i.b == 0; })) {
    const auto [inst, key] = read_instance(p);
    OracleAgent agent(inst);
    const auto r = run_episode(agent, inst, key, RunLimits{}, 0.0, 1).record;
    ++total;
    max_steps = std::max(max_steps, r.steps);
    if (r.reward == 1 && r.steps <= 600 && r.failure_reason == FailureReason::None) ++solved;
  }
  return {total > 0 && solved == total,
          std::to_string(solved) + "/" + std::to_string(total) + " solved, max " + std::to_string(max_steps) +
              " steps"};
}

struct Budgets {
  std::vector<int> slots;
  int global = 0;
  GridAssignment grid;

  bool operator==(const Budgets&) const = default;
};

Budgets budgets_of(const Episode& ep) {
  Budgets b;
  for (const auto& s : ep.instance().hidden) b.slots.push_back(ep.query_budget(s.cell));
  b.global = ep.global_check_budget();
  b.grid = ep.grid();
  return b;
}

Outcome failure_injection() {
  long dispatches = 0;
  long injected = 0;
  long free_violations = 0;
  long step_violations = 0;
  const auto paths = find_instances(g_suite);
  std::uint64_t seed = 0;
  while (dispatches < 20000) {
    const auto [inst, key] = read_instance(paths[seed % paths.size()]);
    Episode ep(inst, 0.3, Rng::derive_seed(99, std::to_string(seed)));
    OracleAgent agent(inst);
    const auto prompt = system_prompt(inst);
    const auto tools = tool_catalog(inst.domain);
    while (!ep.done() && ep.steps() < 600) {
      const auto turn = agent.act(AgentView{inst, prompt, tools, ep.transcript()});
      if (turn.calls.empty()) break;
      for (const auto& call : turn.calls) {
        const auto before = budgets_of(ep);
        const int steps = ep.steps();
        ep.dispatch(call);
        ++dispatches;
        if (ep.steps() != steps + 1) ++step_violations;
        if (ep.transcript().back().injected) {
          ++injected;
          if (!(budgets_of(ep) == before)) ++free_violations;
        }
      }
    }
    ++seed;
  }
  const double rate = static_cast<double>(injected) / static_cast<double>(dispatches);

  int clean = 0;
  int noisy = 0;
  int episodes = 0;
  for (const auto& p : suite_instances([](const Instance& i) { return i.b == 0; })) {
    const auto [inst, key] = read_instance(p);
    for (std::uint64_t s = 0; s < 20; ++s) {
      RandomValidAgent a(inst, s);
      RandomValidAgent b(inst, s);
      clean += run_episode(a, inst, key, RunLimits{}, 0.0, s).record.reward;
      noisy += run_episode(b, inst, key, RunLimits{}, 0.3, s).record.reward;
      ++episodes;
    }
  }
  const bool pass = std::abs(rate - 0.3) <= 0.02 && free_violations == 0 && step_violations == 0 && noisy < clean;
  return {pass, fmt("rate %.4f over %.0f dispatches", rate, static_cast<double>(dispatches)) + ", " +
                    std::to_string(free_violations) + " budget changes, random reward " +
                    fmt("%.3f at p=0 vs %.3f at p=0.3", static_cast<double>(clean) / episodes,
                        static_cast<double>(noisy) / episodes)};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& diff, std::size_t& files) {
  std::vector<fs::path> rel;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
  }
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file() ? 1 : 0;
  if (count_b != rel.size()) {
    diff = "file counts differ";
    return false;
  }
  for (const auto& r : rel) {
    if (!fs::exists(b / r) || read_text_file(a / r) != read_text_file(b / r)) {
      diff = r.string() + " differs";
      return false;
    }
  }
  files = rel.size();
  return true;
}

Outcome determinism() {
  const auto second = g_root / "suite_again";
  generate_suite(SuiteConfig{}, second);
  std::string diff;
  std::size_t files = 0;
  if (!same_tree(g_suite, second, diff, files)) return fail("regenerated suite: " + diff);

  const auto paths = find_instances(g_suite);
  const std::vector<std::pair<std::string, AgentFactory>> factories{
      {"oracle", [](const Instance& i, std::uint64_t) { return std::make_unique<OracleAgent>(i); }},
      {"random", [](const Instance& i, std::uint64_t s) { return std::make_unique<RandomValidAgent>(i, s); }}};
  for (const auto& [name, factory] : factories) {
    SuiteRunOptions one;
    one.limits.parallelism = 1;
    one.fail_rate = 0.1;
    SuiteRunOptions many = one;
    many.limits.parallelism = 64;
    const auto a = run_suite(paths, factory, one);
    const auto b = run_suite(paths, factory, many);
    if (a.size() != b.size()) return fail(name + ": record counts differ");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].same_outcome(b[i])) return fail(name + ": " + a[i].instance + " differs across parallelism");
    }
  }
  return {true, std::to_string(files) + " files byte-identical; oracle and random runs match at 1 and 64 workers"};
}

Outcome limits() {
  const auto [inst, key] = read_instance(g_suite / instance_relpath("travel", 7, 4));
  LoopingAgent looping;
  const auto loop = run_episode(looping, inst, key, RunLimits{}, 0.0, 1).record;
  TruncatingAgent four(std::make_unique<OracleAgent>(inst), 4, 16384);
  const auto over = run_episode(four, inst, key, RunLimits{}, 0.0, 1).record;
  TruncatingAgent three(std::make_unique<OracleAgent>(inst), 3, 16384);
  const auto under = run_episode(three, inst, key, RunLimits{}, 0.0, 1).record;
  const bool pass = loop.steps == 600 && loop.reward == 0 && loop.failure_reason == FailureReason::StepLimit &&
                    over.failure_reason == FailureReason::TokenOverflow && over.reward == 0 &&
                    under.failure_reason != FailureReason::TokenOverflow;
  return {pass, "looping: " + std::to_string(loop.steps) + " steps, reward " + std::to_string(loop.reward) +
                    "; 4 truncations: " + std::string(to_string(over.failure_reason)) +
                    "; 3 truncations: " + std::string(to_string(under.failure_reason))};
}

Outcome no_leakage() {
  const std::regex banned("truth|decoy|filter|allocation|answer.?key|\\.key\\.json", std::regex::icase);
  long results = 0;
  long hits = 0;
  std::string first;
  const auto paths = find_instances(g_suite);


  std::uint64_t seed = 0;
  while (results < 100000) {
    const auto [inst, key] = read_instance(paths[seed % paths.size()]);
    std::unique_ptr<Agent> agent;
    switch (seed % 4) {
      case 0:
        agent = std::make_unique<FuzzAgent>(inst, seed);
        break;
      case 1:
        agent = std::make_unique<OracleAgent>(inst);
        break;
      case 2:
        agent = std::make_unique<RandomValidAgent>(inst, seed);
        break;
      default:
        agent = std::make_unique<LoopingAgent>();
        break;
    }
    RunLimits lim;
    lim.max_steps = seed % 4 == 3 ? 50 : 600;
    const auto res = run_episode(*agent, inst, key, lim, 0.1, seed);
    for (const auto& c : res.transcript["calls"]) {
      ++results;
      const auto text = c["payload"].dump();
      if (std::regex_search(text, banned)) {
        ++hits;
        if (first.empty()) first = c["name"].get<std::string>() + " -> " + text.substr(0, 160);
      }
    }
    ++seed;
  }
  return {hits == 0, std::to_string(hits) + " hits in " + std::to_string(results) + " tool results" +
                         (first.empty() ? "" : "; first: " + first)};
}

}  // namespace

int main() {
  g_root = fs::temp_directory_path() / "gridbench_acceptance";
  fs::remove_all(g_root);
  fs::create_directories(g_root);
  g_suite = g_root / "suite";

  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"suite shape", suite_shape},         {"decoy guarantee", decoy_guarantee},
      {"uniqueness", uniqueness},           {"horizon scaling", horizon_scaling},
      {"difficulty control", difficulty_control}, {"oracle ceiling", oracle_ceiling},
      {"failure injection", failure_injection},   {"determinism", determinism},
      {"limit enforcement", limits},        {"no leakage", no_leakage}};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  fs::remove_all(g_root);
  return failures == 0 ? 0 : 1;
}
