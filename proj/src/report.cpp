#include "gridbench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "gridbench/domains.hpp"
#include "gridbench/errors.hpp"

namespace gridbench {

namespace {

std::string fixed1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

std::string percent(double fraction) { return fixed1(100.0 * fraction); }

AggregateReport aggregate(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw ConfigError("no records to report");
  AggregateReport r;
  std::set<int> hs;
  std::set<int> bs;
  std::set<std::string> seen;
  for (const auto& rec : records) {
    r.by_domain[rec.domain].sum += rec.reward;
    ++r.by_domain[rec.domain].count;
    r.overall.sum += rec.reward;
    ++r.overall.count;
    auto& cell = r.heatmap[{rec.h, rec.b}];
    cell.sum += rec.reward;
    ++cell.count;
    hs.insert(rec.h);
    bs.insert(rec.b);
    seen.insert(rec.domain);
    r.partial_credit.sum += rec.partial_credit;
    ++r.partial_credit.count;
    r.steps.sum += rec.steps;
    ++r.steps.count;
    r.completion_tokens.sum += static_cast<double>(rec.completion_tokens);
    ++r.completion_tokens.count;
    ++r.failures[rec.failure_reason];
  }
  for (const auto& d : list_domains()) {
    if (seen.erase(d) != 0) r.domains.push_back(d);
  }
  r.domains.insert(r.domains.end(), seen.begin(), seen.end());
  r.hs.assign(hs.begin(), hs.end());
  r.bs.assign(bs.begin(), bs.end());
  return r;
}

std::string by_domain_csv(const AggregateReport& r) {
  std::string out = "domain,episodes,mean_reward_pct\n";
  for (const auto& d : r.domains) {
    const auto& m = r.by_domain.at(d);
    out += d + "," + std::to_string(m.count) + "," + percent(m.mean()) + "\n";
  }
  out += "avg," + std::to_string(r.overall.count) + "," + percent(r.overall.mean()) + "\n";
  return out;
}

std::string heatmap_csv(const AggregateReport& r) {
  std::string out = "h";
  for (int b : r.bs) out += ",b=" + std::to_string(b);
  out += "\n";
  for (int h : r.hs) {
    out += std::to_string(h);
    for (int b : r.bs) {
      out += ",";
      auto it = r.heatmap.find({h, b});
      if (it != r.heatmap.end()) out += percent(it->second.mean());
    }
    out += "\n";
  }
  return out;
}

std::string summary_csv(const AggregateReport& r) {
  auto count = [&](FailureReason f) {
    auto it = r.failures.find(f);
    return std::to_string(it == r.failures.end() ? 0 : it->second);
  };
  std::string out = "metric,value\n";
  out += "episodes," + std::to_string(r.overall.count) + "\n";
  out += "mean_reward_pct," + percent(r.overall.mean()) + "\n";
  out += "mean_partial_credit_pct," + percent(r.partial_credit.mean()) + "\n";
  out += "mean_steps," + fixed1(r.steps.mean()) + "\n";
  out += "mean_completion_tokens," + fixed1(r.completion_tokens.mean()) + "\n";
  for (auto f : {FailureReason::None, FailureReason::StepLimit, FailureReason::TokenOverflow,
                 FailureReason::EndpointError}) {
    out += "failure_" + std::string(to_string(f)) + "," + count(f) + "\n";
  }
  return out;
}

void write_report(const AggregateReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "by_domain.csv", by_domain_csv(report));
  write_text_file(dir / "heatmap_h_b.csv", heatmap_csv(report));
  write_text_file(dir / "summary.csv", summary_csv(report));
}

}  // namespace gridbench
