#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gridbench/harness.hpp"

namespace gridbench {

struct CellMean {
  double sum = 0;
  int count = 0;

  double mean() const { return count == 0 ? 0.0 : sum / count; }
};

struct AggregateReport {
  std::vector<std::string> domains;  // catalog order, present domains only
  std::map<std::string, CellMean> by_domain;
  CellMean overall;
  std::vector<int> hs;  // ascending
  std::vector<int> bs;  // ascending
  std::map<std::pair<int, int>, CellMean> heatmap;  // (h, b) -> reward
  CellMean partial_credit;
  CellMean steps;
  CellMean completion_tokens;
  std::map<FailureReason, int> failures;
};

/// Throws ConfigError when `records` is empty.
AggregateReport aggregate(const std::vector<EvalRecord>& records);

/// Percent with one decimal, e.g. 0.3333 -> "33.3".
std::string percent(double fraction);

std::string by_domain_csv(const AggregateReport& report);
/// Header "h,b=0,b=2,..."; one row per h; empty cell when no record matches.
std::string heatmap_csv(const AggregateReport& report);
std::string summary_csv(const AggregateReport& report);

/// Writes by_domain.csv, heatmap_h_b.csv and summary.csv into `dir`.
void write_report(const AggregateReport& report, const std::filesystem::path& dir);

}  // namespace gridbench
