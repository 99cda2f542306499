#include "gridbench/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gridbench/errors.hpp"
#include "gridbench/validate.hpp"

namespace gridbench {

void GenConfig::validate() const {
  schema(domain);
  if (rows <= 0 || cols <= 0) throw ConfigError("grid dimensions must be positive");
  const int cells = rows * cols;
  if (hidden_count < 1 || hidden_count > cells) {
    throw ConfigError("hidden slot count must be in [1, " + std::to_string(cells) + "]");
  }
  if (candidates_per_slot < 2) throw ConfigError("candidates per slot must be at least 2");
  if (decoy_budget < 0) throw ConfigError("decoy budget must be non-negative");
  if (decoy_budget > hidden_count * (candidates_per_slot - 1)) {
    throw ConfigError("decoy budget " + std::to_string(decoy_budget) + " exceeds capacity " +
                      std::to_string(hidden_count * (candidates_per_slot - 1)));
  }
  if (!(relax.t1 < relax.t2 && relax.t2 < relax.t3 && relax.t3 <= max_retries) || relax.t1 < 0) {
    throw ConfigError("relaxation thresholds must satisfy t1 < t2 < t3 <= max_retries");
  }
  if (query_budget < 0 || global_check_budget < 0) throw ConfigError("budgets must be non-negative");
  if (max_resamples < 1) throw ConfigError("max_resamples must be positive");
  if (pool_size < static_cast<std::size_t>(cells + candidates_per_slot)) {
    throw ConfigError("pool size must cover the grid plus one candidate list");
  }
}

std::vector<Item> pool_for(const GenConfig& config) {
  auto rng = Rng::derive(config.pool_seed, "pool:" + config.domain);
  return sample_pool(config.domain, config.pool_size, rng,
                     static_cast<std::size_t>(config.rows * config.cols + config.candidates_per_slot));
}

GridAssignment sample_truth_grid(std::span<const Item> pool, int rows, int cols, Rng& rng) {
  const auto cells = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (pool.size() < cells) throw GenerationError("pool exhausted: need " + std::to_string(cells) + " items");
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Partial Fisher-Yates: the first `cells` positions are a uniform sample.
  for (std::size_t i = 0; i < cells; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
  GridAssignment grid(rows, cols);
  for (std::size_t i = 0; i < cells; ++i) {
    grid.set(Cell{static_cast<int>(i) / cols, static_cast<int>(i) % cols}, pool[order[i]].id);
  }
  return grid;
}

namespace {

std::int64_t grid_sum(const GridAssignment& grid, const ItemTable& items, const GlobalConstraint& probe) {
  std::int64_t total = 0;
  for (const auto& id : grid.cells()) total += contribution(lookup_item(items, *id), probe);
  return total;
}

GlobalConstraint category_count(const GridAssignment& truth, const ItemTable& items, const CategoricalField& field,
                                Rng& rng) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& id : truth.cells()) {
    counts[std::get<std::string>(lookup_item(items, *id).attribute(field.name))]++;
  }
  // Categories present in the truth grid, in schema order.
  std::vector<std::string> present;
  for (const auto& cat : field.categories) {
    if (counts.contains(cat)) present.push_back(cat);
  }
  const auto& category = rng.pick(present);
  return GlobalConstraint{GlobalKind::CategoryCountUpper, field.name, category, counts[category]};
}

}  // namespace

std::vector<GlobalConstraint> synthesize_global_constraints(const GridAssignment& truth, const ItemTable& items,
                                                            const DomainSchema& schema, Rng& rng) {
  std::vector<GlobalConstraint> out;
  for (const auto& field : {schema.cost_field, schema.load_field}) {
    GlobalConstraint c{GlobalKind::SumUpper, field, {}, 0};
    const auto sum = grid_sum(truth, items, c);
    c.bound = sum + rng.between(0, sum * 5 / 100);
    out.push_back(c);
  }
  {
    GlobalConstraint c{GlobalKind::SumLower, schema.benefit_field, {}, 0};
    const auto sum = grid_sum(truth, items, c);
    c.bound = sum - rng.between(0, sum * 2 / 100);
    out.push_back(c);
  }
  for (const auto& field : schema.categorical_fields) out.push_back(category_count(truth, items, field, rng));
  return out;
}

std::vector<SlotConstraint> synthesize_slot_constraints(const Item& truth, const DomainSchema& schema,
                                                        std::span<const std::string> fields, Rng& rng) {
  std::vector<SlotConstraint> out;
  for (const auto& name : fields) {
    if (const auto* f = schema.numeric(name)) {
      const auto v = std::get<std::int64_t>(truth.attribute(name));
      // Lean toward the side with more room so some items always violate.
      const bool le = rng.below(static_cast<std::uint64_t>(f->max - f->min)) <
                      static_cast<std::uint64_t>(f->max - v);
      if (le) {
        out.push_back({name, Comparator::LE, v + rng.between(0, (f->max - v) * 3 / 4)});
      } else {
        out.push_back({name, Comparator::GE, v - rng.between(0, (v - f->min) * 3 / 4)});
      }
      continue;
    }
    const auto* f = schema.categorical(name);
    if (f == nullptr) throw SchemaError(name, "unknown attribute '" + name + "' in domain " + schema.domain);
    const auto& v = std::get<std::string>(truth.attribute(name));
    std::vector<std::string> others;
    for (const auto& cat : f->categories) {
      if (cat != v) others.push_back(cat);
    }
    rng.shuffle(others);
    switch (rng.below(5)) {
      case 0:
        out.push_back({name, Comparator::EQ, v});
        break;
      case 1:
      case 2: {
        const auto extra = static_cast<std::size_t>(rng.between(1, 2));
        std::vector<std::string> set{v};
        set.insert(set.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(extra));
        // Schema order keeps the rendering independent of draw order.
        std::vector<std::string> ordered;
        for (const auto& cat : f->categories) {
          if (std::find(set.begin(), set.end(), cat) != set.end()) ordered.push_back(cat);
        }
        out.push_back({name, Comparator::IN, std::move(ordered)});
        break;
      }
      default:
        out.push_back({name, Comparator::NE, others.front()});
        break;
    }
  }
  return out;
}

std::vector<SlotConstraint> synthesize_slot_constraints(const Item& truth, const DomainSchema& schema, Rng& rng) {
  auto names = schema.field_names();
  rng.shuffle(names);
  names.resize(2);
  return synthesize_slot_constraints(truth, schema, names, rng);
}

std::vector<Cell> select_hidden_slots(int rows, int cols, int hidden_count, Rng& rng) {
  if (hidden_count < 0 || hidden_count > rows * cols) throw ConfigError("hidden slot count out of range");
  std::vector<Cell> cells;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) cells.push_back({r, c});
  }
  for (int i = 0; i < hidden_count; ++i) {
    std::swap(cells[static_cast<std::size_t>(i)],
              cells[static_cast<std::size_t>(i) + rng.below(cells.size() - static_cast<std::size_t>(i))]);
  }
  cells.resize(static_cast<std::size_t>(hidden_count));
  std::sort(cells.begin(), cells.end());
  return cells;
}

std::vector<DecoyAllocation> select_decoy_slots(std::span<const Cell> hidden, int budget, int k, Rng& rng) {
  const int h = static_cast<int>(hidden.size());
  const int cap = k - 1;
  if (budget < 0 || budget > h * cap) {
    throw ConfigError("decoy budget " + std::to_string(budget) + " exceeds capacity " + std::to_string(h * cap));
  }
  std::vector<DecoyAllocation> open;
  if (budget == 0) return open;

  std::vector<Cell> order(hidden.begin(), hidden.end());
  rng.shuffle(order);
  // One draw fixes where in [min, max] the slot count sits for every budget,
  // which keeps the count uniform per budget and non-decreasing across budgets.
  const double u = rng.unit();
  for (int n = 1; n <= budget; ++n) {
    const int lo = (n + cap - 1) / cap;
    const int hi = std::min(h, n);
    const int slots = lo + static_cast<int>(std::floor(u * (hi - lo + 1)));
    if (slots > static_cast<int>(open.size())) {
      open.push_back({order[open.size()], 1});
      continue;
    }
    std::vector<std::size_t> room;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (open[i].count < cap) room.push_back(i);
    }
    open[rng.pick(room)].count++;
  }
  std::stable_sort(open.begin(), open.end(),
                   [](const DecoyAllocation& a, const DecoyAllocation& b) { return a.count > b.count; });
  return open;
}

std::vector<std::string> collect_filter_candidates(std::span<const Item> pool,
                                                   std::span<const SlotConstraint> constraints, std::size_t need,
                                                   const std::set<std::string, std::less<>>& excluded, Rng& rng) {
  std::vector<const Item*> violators;
  for (const auto& item : pool) {
    if (!excluded.contains(item.id) && !eval_slot(item, constraints)) violators.push_back(&item);
  }
  if (violators.size() < need) {
    throw GenerationError("only " + std::to_string(violators.size()) + " items violate the slot constraints, need " +
                          std::to_string(need));
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < need; ++i) {
    std::swap(violators[i], violators[i + rng.below(violators.size() - i)]);
    out.push_back(violators[i]->id);
  }
  return out;
}

std::pair<const Item*, int> sample_decoy(const DecoyRequest& request, std::span<const Item> pool,
                                         const std::set<std::string, std::less<>>& excluded, Rng& rng) {
  const auto& ctx = *request.context;
  const auto constraints = ctx.constraints();

  std::vector<const Item*> local;
  for (const auto& item : pool) {
    if (!excluded.contains(item.id) && eval_slot(item, request.slot_constraints)) local.push_back(&item);
  }

  // Items meeting each target; upper-bound targets are preferred.
  std::vector<std::vector<const Item*>> upper;
  std::vector<std::vector<const Item*>> lower;
  for (const auto& target : ctx.targets()) {
    std::vector<const Item*> hits;
    for (const Item* item : local) {
      if (target.accepts(contribution(*item, constraints[target.constraint]))) hits.push_back(item);
    }
    if (hits.empty()) continue;
    (constraints[target.constraint].is_upper_bound() ? upper : lower).push_back(std::move(hits));
  }

  const auto draw = [&]() -> const Item* {
    if (!upper.empty()) return rng.pick(rng.pick(upper));
    if (!lower.empty()) return rng.pick(rng.pick(lower));
    if (!local.empty()) return rng.pick(local);
    return nullptr;
  };

  for (int attempt = 1; attempt <= request.max_retries; ++attempt) {
    const Item* candidate = draw();
    if (candidate == nullptr) break;
    if (!ctx.hard_check(*candidate)) continue;
    if (request.last_decoy_slot || attempt > request.relax.t3) return {candidate, attempt};
    const auto level = attempt <= request.relax.t1   ? PrefixLevel::AllHistories
                       : attempt <= request.relax.t2 ? PrefixLevel::PrefixTruthSuffixDecoy
                                                     : PrefixLevel::AllTruth;
    if (ctx.open_prefix_check(*candidate, level)) return {candidate, attempt};
  }
  throw GenerationError("slot " + to_string(request.slot) + ": no decoy accepted after " +
                        std::to_string(request.max_retries) + " attempts");
}

namespace {

constexpr int kConstraintRedraws = 50;

// Enough items on both sides of the slot constraints, counting only items
// outside the truth grid. Independent of the decoy budget.
bool slot_constraints_usable(std::span<const Item> pool, std::span<const SlotConstraint> constraints,
                             const std::set<std::string, std::less<>>& truth_ids, int k) {
  std::size_t pass = 0;
  std::size_t fail = 0;
  for (const auto& item : pool) {
    if (truth_ids.contains(item.id)) continue;
    (eval_slot(item, constraints) ? pass : fail)++;
  }
  return fail >= static_cast<std::size_t>(3 * k) && pass >= static_cast<std::size_t>(k);
}

std::pair<Instance, AnswerKey> generate_once(const GenConfig& cfg, std::span<const Item> pool,
                                             const ItemTable& table, std::uint64_t structure_seed,
                                             std::uint64_t candidate_seed) {
  const auto& dom = schema(cfg.domain);
  const int k = cfg.candidates_per_slot;

  auto truth_rng = Rng::derive(structure_seed, "truth");
  const auto truth = sample_truth_grid(pool, cfg.rows, cfg.cols, truth_rng);
  auto global_rng = Rng::derive(structure_seed, "global");
  const auto globals = synthesize_global_constraints(truth, table, dom, global_rng);
  auto hidden_rng = Rng::derive(structure_seed, "hidden");
  const auto hidden = select_hidden_slots(cfg.rows, cfg.cols, cfg.hidden_count, hidden_rng);

  std::set<std::string, std::less<>> truth_ids;
  for (const auto& id : truth.cells()) truth_ids.insert(*id);

  // Fields are dealt round-robin from one shuffled list so the slots together
  // cover the attribute space.
  auto slot_rng = Rng::derive(structure_seed, "slots");
  auto fields = dom.field_names();
  slot_rng.shuffle(fields);
  std::map<Cell, std::vector<SlotConstraint>> slot_constraints;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const std::string pair[2] = {fields[(2 * i) % fields.size()], fields[(2 * i + 1) % fields.size()]};
    const Item& item = lookup_item(table, *truth.at(hidden[i]));
    auto cs = synthesize_slot_constraints(item, dom, pair, slot_rng);
    for (int redraw = 0; redraw < kConstraintRedraws && !slot_constraints_usable(pool, cs, truth_ids, k); ++redraw) {
      cs = synthesize_slot_constraints(item, dom, pair, slot_rng);
    }
    slot_constraints[hidden[i]] = std::move(cs);
  }

  auto alloc_rng = Rng::derive(structure_seed, "allocation");
  const auto allocations = select_decoy_slots(hidden, cfg.decoy_budget, k, alloc_rng);

  // Decoy slots first, largest share first; then the decoy-free slots.
  std::vector<Cell> order;
  std::map<Cell, int> share;
  for (const auto& a : allocations) {
    order.push_back(a.cell);
    share[a.cell] = a.count;
  }
  for (const auto& cell : hidden) {
    if (!share.contains(cell)) order.push_back(cell);
  }

  auto cand_rng = Rng::derive(candidate_seed, "candidates");
  auto used = truth_ids;
  AnswerKey key;
  key.allocations = allocations;
  std::vector<PriorSlot> priors;
  std::map<Cell, std::vector<std::string>> candidates;

  for (const auto& cell : order) {
    const auto& truth_id = *truth.at(cell);
    const auto& cs = slot_constraints[cell];
    const int b_s = share.contains(cell) ? share[cell] : 0;
    std::vector<std::string> decoys;
    if (b_s > 0) {
      const DecoyContext ctx(truth, table, globals, priors, cell, hidden);
      DecoyRequest request{cell, &ctx, cs, cell == allocations.back().cell, cfg.relax, cfg.max_retries};
      for (int d = 0; d < b_s; ++d) {
        const auto [item, attempt] = sample_decoy(request, pool, used, cand_rng);
        (void)attempt;
        used.insert(item->id);
        decoys.push_back(item->id);
      }
      priors.push_back({cell, truth_id, decoys});
    }
    auto filters = collect_filter_candidates(pool, cs, static_cast<std::size_t>(k - 1 - b_s), used, cand_rng);
    used.insert(filters.begin(), filters.end());

    std::vector<std::string> all{truth_id};
    all.insert(all.end(), decoys.begin(), decoys.end());
    all.insert(all.end(), filters.begin(), filters.end());
    cand_rng.shuffle(all);
    candidates[cell] = std::move(all);

    key.truth[cell] = truth_id;
    key.decoys[cell] = std::move(decoys);
    key.filters[cell] = std::move(filters);
  }

  Instance inst;
  inst.domain = cfg.domain;
  inst.rows = cfg.rows;
  inst.cols = cfg.cols;
  inst.seed = cfg.seed;
  inst.h = cfg.hidden_count;
  inst.b = cfg.decoy_budget;
  inst.b_requested = cfg.requested_budget.value_or(cfg.decoy_budget);
  inst.k = k;
  inst.global_check_budget = cfg.global_check_budget;
  inst.global_constraints = globals;
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      const Cell cell{r, c};
      const auto& id = *truth.at(cell);
      inst.items.emplace(id, lookup_item(table, id));
      if (!candidates.contains(cell)) inst.prefilled.push_back({cell, id});
    }
  }
  for (const auto& cell : hidden) {
    for (const auto& id : candidates[cell]) inst.items.emplace(id, lookup_item(table, id));
    inst.hidden.push_back({cell, slot_constraints[cell], candidates[cell], cfg.query_budget});
  }
  return {std::move(inst), std::move(key)};
}

}  // namespace

std::pair<Instance, AnswerKey> generate(const GenConfig& config) {
  const auto pool = pool_for(config);
  return generate(config, pool);
}

std::pair<Instance, AnswerKey> generate(const GenConfig& config, std::span<const Item> pool) {
  config.validate();
  ItemTable table;
  for (const auto& item : pool) table.emplace(item.id, item);

  std::string last_failure;
  for (int attempt = 0; attempt < config.max_resamples; ++attempt) {
    // The first half of the resamples only redraws candidates, which keeps
    // the truth grid, constraints and decoy split tied to the seed alone.
    const auto structure_seed = attempt < (config.max_resamples + 1) / 2
                                    ? config.seed
                                    : Rng::derive_seed(config.seed, "resample:" + std::to_string(attempt));
    const auto candidate_seed = Rng::derive_seed(config.seed, "candidates:" + std::to_string(attempt));
    try {
      auto result = generate_once(config, pool, table, structure_seed, candidate_seed);
      const auto report = validate(result.first, result.second);
      if (report.ok()) return result;
      last_failure = "validation failed: " + report.failures.front();
    } catch (const GenerationError& e) {
      last_failure = e.what();
    }
  }
  throw GenerationError(config.domain + " h=" + std::to_string(config.hidden_count) +
                        " b=" + std::to_string(config.decoy_budget) + ": " + last_failure + " (after " +
                        std::to_string(config.max_resamples) + " resamples)");
}

}  // namespace gridbench
