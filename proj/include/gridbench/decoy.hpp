#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridbench/constraints.hpp"

namespace gridbench {

/// An earlier decoy slot: its truth item and the decoys already accepted there.
struct PriorSlot {
  Cell cell;
  std::string truth;
  std::vector<std::string> decoys;
};

/// How much of the history space the open-prefix preference must cover.
enum class PrefixLevel {
  AllHistories = 1,         // every truth/decoy combination of prior decoy slots
  PrefixTruthSuffixDecoy = 2,  // priors [0, j) at truth, [j, m) at some decoy
  AllTruth = 3,             // every prior decoy slot at its truth
};

/// A condition on a single item that by itself forces a global violation
/// for every prior combination once the rest of the grid is at truth.
struct DecoyTarget {
  std::size_t constraint = 0;  // index into the global constraints
  bool above = true;           // contribution > threshold (else < threshold)
  std::int64_t threshold = 0;

  bool accepts(std::int64_t contribution) const noexcept {
    return above ? contribution > threshold : contribution < threshold;
  }
};

/// Decoy checks for one hidden slot.
///
/// Cells fall into four groups: pre-filled cells, prior decoy slots (the
/// history), the slot itself, and every other hidden slot (the future).
/// The hard check fills the future with truth; the open-prefix check leaves
/// it empty.
class DecoyContext {
 public:
  /// `truth_grid` is the full truth assignment; `hidden` lists every hidden
  /// cell, including `slot` and the prior slots.
  DecoyContext(const GridAssignment& truth_grid, const ItemTable& items,
               std::span<const GlobalConstraint> constraints, std::vector<PriorSlot> priors, Cell slot,
               std::span<const Cell> hidden);

  /// True iff, for every combination of prior choices, placing `candidate`
  /// here with truth everywhere else violates some global constraint.
  bool hard_check(const Item& candidate) const;

  /// True iff the open-prefix evaluation (history + candidate, future empty)
  /// passes for every history in the level's set.
  bool open_prefix_check(const Item& candidate, PrefixLevel level) const;

  /// One target per constraint that can still be violated by a single item.
  std::vector<DecoyTarget> targets() const;

  std::span<const GlobalConstraint> constraints() const { return constraints_; }
  const std::vector<PriorSlot>& priors() const { return priors_; }

 private:
  std::vector<std::int64_t> candidate_vector(const Item& candidate) const;
  bool combo_satisfies_exists(std::size_t depth, std::vector<std::int64_t>& sums,
                              std::span<const std::int64_t> cand) const;

  std::vector<GlobalConstraint> constraints_;
  std::vector<PriorSlot> priors_;
  const ItemTable* items_;
  std::size_t num_constraints_ = 0;
  bool has_future_ = false;
  // Per constraint aggregates of cells outside the history and the slot.
  std::vector<std::int64_t> fixed_full_;  // pre-filled + future at truth
  std::vector<std::int64_t> fixed_open_;  // pre-filled only
  // options_[i] holds, per option (truth first), one contribution per constraint.
  std::vector<std::vector<std::vector<std::int64_t>>> options_;
  // Per prior depth i, min/max of the remaining sum over priors [i, m).
  std::vector<std::vector<std::int64_t>> suffix_min_;
  std::vector<std::vector<std::int64_t>> suffix_max_;
};

}  // namespace gridbench
