#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridbench/constraints.hpp"
#include "gridbench/decoy.hpp"
#include "gridbench/domains.hpp"
#include "gridbench/instance.hpp"
#include "gridbench/rng.hpp"

namespace gridbench {

/// Attempt counts at which the open-prefix preference relaxes a level.
struct RelaxThresholds {
  int t1 = 30;
  int t2 = 50;
  int t3 = 70;
};

struct GenConfig {
  std::string domain = "course";
  int rows = 5;
  int cols = 7;
  int hidden_count = 5;
  int decoy_budget = 0;
  /// Suite coordinate echoed into the instance; defaults to decoy_budget.
  std::optional<int> requested_budget;
  int candidates_per_slot = 25;
  RelaxThresholds relax;
  int max_retries = 200;
  std::uint64_t seed = 42;

  std::size_t pool_size = kDefaultPoolSize;
  std::uint64_t pool_seed = 42;
  int query_budget = 40;
  int global_check_budget = 60;
  /// Whole-instance resamples after a decoy or filter shortage.
  int max_resamples = 10;

  /// Throws ConfigError.
  void validate() const;
};

/// Pool used by generate(config): sample_pool(domain, pool_size) seeded by
/// pool_seed, so every instance of a domain shares one pool.
std::vector<Item> pool_for(const GenConfig& config);

/// Runs the full pipeline and validates the result before returning.
/// Throws ConfigError or GenerationError.
std::pair<Instance, AnswerKey> generate(const GenConfig& config);
std::pair<Instance, AnswerKey> generate(const GenConfig& config, std::span<const Item> pool);

// Pipeline stages. Each takes its own generator.

/// Distinct items, row-major.
GridAssignment sample_truth_grid(std::span<const Item> pool, int rows, int cols, Rng& rng);

/// Cost and load sums bounded above (truth sum + up to 5% slack), the
/// benefit sum bounded below (truth sum - up to 2%), and one tight category
/// count per categorical field. The truth grid satisfies all of them.
std::vector<GlobalConstraint> synthesize_global_constraints(const GridAssignment& truth, const ItemTable& items,
                                                            const DomainSchema& schema, Rng& rng);

/// Two constraints on two distinct random fields, both satisfied by `truth`.
std::vector<SlotConstraint> synthesize_slot_constraints(const Item& truth, const DomainSchema& schema, Rng& rng);
/// Same, on the given fields.
std::vector<SlotConstraint> synthesize_slot_constraints(const Item& truth, const DomainSchema& schema,
                                                        std::span<const std::string> fields, Rng& rng);

std::vector<Cell> select_hidden_slots(int rows, int cols, int hidden_count, Rng& rng);

/// Picks decoy slots and splits the budget among them, each share in
/// [1, k-1]. Result is in processing order (largest share first).
///
/// Shares are built one decoy at a time from a single stream, so for a fixed
/// generator state the split for budget n+1 refines the split for n.
std::vector<DecoyAllocation> select_decoy_slots(std::span<const Cell> hidden, int budget, int k, Rng& rng);

/// `need` distinct items failing the slot constraints, none in `excluded`.
/// Throws GenerationError when there are not enough.
std::vector<std::string> collect_filter_candidates(std::span<const Item> pool,
                                                   std::span<const SlotConstraint> constraints, std::size_t need,
                                                   const std::set<std::string, std::less<>>& excluded, Rng& rng);

struct DecoyRequest {
  Cell slot;
  const DecoyContext* context = nullptr;
  std::span<const SlotConstraint> slot_constraints;
  bool last_decoy_slot = false;
  RelaxThresholds relax;
  int max_retries = 200;
};

/// Targeted sampling with the hard check and the relaxing open-prefix
/// preference. Returns the accepted item and the attempt it was found on.
/// Throws GenerationError after max_retries attempts.
std::pair<const Item*, int> sample_decoy(const DecoyRequest& request, std::span<const Item> pool,
                                         const std::set<std::string, std::less<>>& excluded, Rng& rng);

}  // namespace gridbench
