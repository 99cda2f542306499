#include "gridbench/validate.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "gridbench/decoy.hpp"
#include "gridbench/errors.hpp"

namespace gridbench {

namespace {

void check_truth(const Instance& inst, const AnswerKey& key, ValidationReport& report) {
  const auto fail = [&](const std::string& msg) {
    report.truth_ok = false;
    report.failures.push_back("(i) " + msg);
  };
  if (static_cast<int>(inst.hidden.size()) != inst.h) fail("hidden slot count differs from h");
  std::set<Cell> seen;
  for (const auto& p : inst.prefilled) seen.insert(p.cell);
  for (const auto& s : inst.hidden) {
    if (!seen.insert(s.cell).second) fail("cell " + to_string(s.cell) + " is both pre-filled and hidden");
  }
  if (static_cast<int>(seen.size()) != inst.rows * inst.cols) fail("pre-filled and hidden cells do not cover the grid");
  if (!report.truth_ok) return;

  for (const auto& slot : inst.hidden) {
    auto it = key.truth.find(slot.cell);
    if (it == key.truth.end()) {
      fail("slot " + to_string(slot.cell) + " has no truth item");
      continue;
    }
    if (!eval_slot(lookup_item(inst.items, it->second), slot.constraints)) {
      fail("slot " + to_string(slot.cell) + ": truth " + it->second + " violates its slot constraints");
    }
  }
  if (!report.truth_ok) return;
  if (!eval_global_full(key.truth_grid(inst), inst.items, inst.global_constraints)) {
    fail("truth grid violates the global constraints");
  }
}

void check_candidates(const Instance& inst, const AnswerKey& key, ValidationReport& report) {
  const auto fail = [&](const Cell& cell, const std::string& msg) {
    report.candidates_ok = false;
    report.failures.push_back("(ii) slot " + to_string(cell) + ": " + msg);
  };
  std::map<Cell, int> share;
  for (const auto& a : key.allocations) share[a.cell] += a.count;
  const int total = std::accumulate(key.allocations.begin(), key.allocations.end(), 0,
                                    [](int acc, const DecoyAllocation& a) { return acc + a.count; });
  if (total != inst.b) {
    report.candidates_ok = false;
    report.failures.push_back("(ii) allocations sum to " + std::to_string(total) + ", expected " + std::to_string(inst.b));
  }

  static const std::vector<std::string> none;
  for (const auto& slot : inst.hidden) {
    const auto find = [&](const auto& m) -> const std::vector<std::string>& {
      auto it = m.find(slot.cell);
      return it == m.end() ? none : it->second;
    };
    const auto& decoys = find(key.decoys);
    const auto& filters = find(key.filters);
    auto truth_it = key.truth.find(slot.cell);

    if (static_cast<int>(slot.candidates.size()) != inst.k) {
      fail(slot.cell, std::to_string(slot.candidates.size()) + " candidates, expected " + std::to_string(inst.k));
    }
    const std::set<std::string> cands(slot.candidates.begin(), slot.candidates.end());
    if (cands.size() != slot.candidates.size()) fail(slot.cell, "duplicate candidates");

    std::vector<std::string> labelled;
    if (truth_it != key.truth.end()) labelled.push_back(truth_it->second);
    labelled.insert(labelled.end(), decoys.begin(), decoys.end());
    labelled.insert(labelled.end(), filters.begin(), filters.end());
    const std::set<std::string> labels(labelled.begin(), labelled.end());
    if (labels.size() != labelled.size()) fail(slot.cell, "labelled groups overlap");
    if (labels != cands) fail(slot.cell, "labelled groups do not match the candidate list");

    const int expected = share.contains(slot.cell) ? share[slot.cell] : 0;
    if (static_cast<int>(decoys.size()) != expected) {
      fail(slot.cell, std::to_string(decoys.size()) + " decoys, allocation says " + std::to_string(expected));
    }
    for (const auto& id : filters) {
      if (eval_slot(lookup_item(inst.items, id), slot.constraints)) fail(slot.cell, id + " passes the slot constraints");
    }
    for (const auto& id : decoys) {
      if (!eval_slot(lookup_item(inst.items, id), slot.constraints)) fail(slot.cell, id + " fails the slot constraints");
    }
  }
}

void check_decoys(const Instance& inst, const AnswerKey& key, ValidationReport& report) {
  const auto truth = key.truth_grid(inst);
  std::vector<Cell> hidden;
  for (const auto& s : inst.hidden) hidden.push_back(s.cell);

  std::vector<PriorSlot> priors;
  for (const auto& a : key.allocations) {
    auto it = key.decoys.find(a.cell);
    const std::vector<std::string> decoys = it == key.decoys.end() ? std::vector<std::string>{} : it->second;
    const DecoyContext ctx(truth, inst.items, inst.global_constraints, priors, a.cell, hidden);
    for (const auto& id : decoys) {
      if (!ctx.hard_check(lookup_item(inst.items, id))) {
        report.decoys_ok = false;
        report.failures.push_back("(iii) slot " + to_string(a.cell) + ": " + id +
                                  " does not force a global violation for every prior combination");
      }
    }
    priors.push_back({a.cell, key.truth.at(a.cell), decoys});
  }
}

}  // namespace

ValidationReport validate(const Instance& instance, const AnswerKey& key) {
  ValidationReport report;
  try {
    check_truth(instance, key, report);
    check_candidates(instance, key, report);
    if (report.truth_ok) check_decoys(instance, key, report);
  } catch (const std::exception& e) {
    report.truth_ok = false;
    report.failures.push_back(std::string("(i) malformed instance: ") + e.what());
  }
  return report;
}

}  // namespace gridbench
