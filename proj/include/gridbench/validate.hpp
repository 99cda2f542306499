#pragma once

#include <string>
#include <vector>

#include "gridbench/instance.hpp"

namespace gridbench {

/// Outcome of the three instance checks. Failure messages start with the
/// check they belong to: "(i)", "(ii)" or "(iii)".
struct ValidationReport {
  bool truth_ok = true;       // (i) truth meets every slot and global constraint
  bool candidates_ok = true;  // (ii) K candidates split into truth/decoys/filters
  bool decoys_ok = true;      // (iii) every decoy passes the hard check again
  std::vector<std::string> failures;

  bool ok() const noexcept { return truth_ok && candidates_ok && decoys_ok; }
};

/// Never throws on bad content; problems land in the report.
ValidationReport validate(const Instance& instance, const AnswerKey& key);

}  // namespace gridbench
