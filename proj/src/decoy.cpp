#include "gridbench/decoy.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "gridbench/errors.hpp"

namespace gridbench {

DecoyContext::DecoyContext(const GridAssignment& truth_grid, const ItemTable& items,
                           std::span<const GlobalConstraint> constraints, std::vector<PriorSlot> priors,
                           Cell slot, std::span<const Cell> hidden)
    : constraints_(constraints.begin(), constraints.end()),
      priors_(std::move(priors)),
      items_(&items),
      num_constraints_(constraints_.size()),
      fixed_full_(num_constraints_, 0),
      fixed_open_(num_constraints_, 0) {
  if (!truth_grid.is_full()) throw PreconditionError("decoy checks need a full truth grid");

  std::set<Cell> prior_cells;
  for (const auto& p : priors_) prior_cells.insert(p.cell);
  const std::set<Cell> hidden_cells(hidden.begin(), hidden.end());

  for (int r = 0; r < truth_grid.rows(); ++r) {
    for (int c = 0; c < truth_grid.cols(); ++c) {
      const Cell cell{r, c};
      if (cell == slot || prior_cells.contains(cell)) continue;
      const Item& item = lookup_item(items, *truth_grid.at(cell));
      const bool future = hidden_cells.contains(cell);
      has_future_ = has_future_ || future;
      for (std::size_t g = 0; g < num_constraints_; ++g) {
        const auto v = contribution(item, constraints_[g]);
        fixed_full_[g] += v;
        if (!future) fixed_open_[g] += v;
      }
    }
  }

  for (const auto& p : priors_) {
    std::vector<std::vector<std::int64_t>> opts;
    std::vector<std::string> ids{p.truth};
    ids.insert(ids.end(), p.decoys.begin(), p.decoys.end());
    for (const auto& id : ids) {
      const Item& item = lookup_item(items, id);
      std::vector<std::int64_t> v(num_constraints_);
      for (std::size_t g = 0; g < num_constraints_; ++g) v[g] = contribution(item, constraints_[g]);
      opts.push_back(std::move(v));
    }
    options_.push_back(std::move(opts));
  }

  const auto m = options_.size();
  suffix_min_.assign(m + 1, std::vector<std::int64_t>(num_constraints_, 0));
  suffix_max_.assign(m + 1, std::vector<std::int64_t>(num_constraints_, 0));
  for (std::size_t i = m; i-- > 0;) {
    for (std::size_t g = 0; g < num_constraints_; ++g) {
      auto lo = std::numeric_limits<std::int64_t>::max();
      auto hi = std::numeric_limits<std::int64_t>::min();
      for (const auto& opt : options_[i]) {
        lo = std::min(lo, opt[g]);
        hi = std::max(hi, opt[g]);
      }
      suffix_min_[i][g] = suffix_min_[i + 1][g] + lo;
      suffix_max_[i][g] = suffix_max_[i + 1][g] + hi;
    }
  }
}

std::vector<std::int64_t> DecoyContext::candidate_vector(const Item& candidate) const {
  std::vector<std::int64_t> v(num_constraints_);
  for (std::size_t g = 0; g < num_constraints_; ++g) v[g] = contribution(candidate, constraints_[g]);
  return v;
}

// Depth-first search for a prior combination under which the grid satisfies
// every constraint. Subtrees are cut as soon as one constraint can no longer
// hold whatever the remaining priors pick.
bool DecoyContext::combo_satisfies_exists(std::size_t depth, std::vector<std::int64_t>& sums,
                                          std::span<const std::int64_t> cand) const {
  for (std::size_t g = 0; g < num_constraints_; ++g) {
    const auto& c = constraints_[g];
    const auto base = fixed_full_[g] + cand[g] + sums[g];
    if (c.is_upper_bound()) {
      if (base + suffix_min_[depth][g] > c.bound) return false;
    } else if (base + suffix_max_[depth][g] < c.bound) {
      return false;
    }
  }
  if (depth == options_.size()) return true;
  for (const auto& opt : options_[depth]) {
    for (std::size_t g = 0; g < num_constraints_; ++g) sums[g] += opt[g];
    const bool found = combo_satisfies_exists(depth + 1, sums, cand);
    for (std::size_t g = 0; g < num_constraints_; ++g) sums[g] -= opt[g];
    if (found) return true;
  }
  return false;
}

bool DecoyContext::hard_check(const Item& candidate) const {
  const auto cand = candidate_vector(candidate);
  std::vector<std::int64_t> sums(num_constraints_, 0);
  return !combo_satisfies_exists(0, sums, cand);
}

bool DecoyContext::open_prefix_check(const Item& candidate, PrefixLevel level) const {
  const auto cand = candidate_vector(candidate);
  const auto m = options_.size();
  for (std::size_t g = 0; g < num_constraints_; ++g) {
    const auto& c = constraints_[g];
    // With no future cells the open grid is full and lower bounds apply too.
    if (!c.is_upper_bound() && has_future_) continue;
    const bool upper = c.is_upper_bound();
    const auto base = fixed_open_[g] + cand[g];

    // Worst history in the level's set for this constraint. The level passes
    // iff every constraint holds for every history, and with one aggregate
    // per constraint that reduces to its worst history.
    std::int64_t worst = 0;
    switch (level) {
      case PrefixLevel::AllHistories:
        worst = upper ? suffix_max_[0][g] : suffix_min_[0][g];
        break;
      case PrefixLevel::PrefixTruthSuffixDecoy: {
        // Priors [0, j) at truth, [j, m) at their worst decoy, j = 0..m.
        std::vector<std::int64_t> worst_decoy_suffix(m + 1, 0);
        for (std::size_t i = m; i-- > 0;) {
          std::int64_t w = upper ? std::numeric_limits<std::int64_t>::min() : std::numeric_limits<std::int64_t>::max();
          for (std::size_t o = 1; o < options_[i].size(); ++o) {
            w = upper ? std::max(w, options_[i][o][g]) : std::min(w, options_[i][o][g]);
          }
          if (options_[i].size() == 1) w = options_[i][0][g];
          worst_decoy_suffix[i] = worst_decoy_suffix[i + 1] + w;
        }
        std::int64_t truth_prefix = 0;
        worst = worst_decoy_suffix[0];
        for (std::size_t j = 1; j <= m; ++j) {
          truth_prefix += options_[j - 1][0][g];
          const auto total = truth_prefix + worst_decoy_suffix[j];
          worst = upper ? std::max(worst, total) : std::min(worst, total);
        }
        break;
      }
      case PrefixLevel::AllTruth:
        for (std::size_t i = 0; i < m; ++i) worst += options_[i][0][g];
        break;
    }
    if (!holds(c, base + worst)) return false;
  }
  return true;
}

std::vector<DecoyTarget> DecoyContext::targets() const {
  std::vector<DecoyTarget> out;
  for (std::size_t g = 0; g < num_constraints_; ++g) {
    const auto& c = constraints_[g];
    DecoyTarget t;
    t.constraint = g;
    if (c.is_upper_bound()) {
      // Violated for every combination iff even the smallest prior sum overflows.
      t.above = true;
      t.threshold = c.bound - fixed_full_[g] - suffix_min_[0][g];
      if (c.kind == GlobalKind::CategoryCountUpper && t.threshold >= 1) continue;
    } else {
      t.above = false;
      t.threshold = c.bound - fixed_full_[g] - suffix_max_[0][g];
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace gridbench
