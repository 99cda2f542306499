#include <algorithm>
#include <charconv>
#include <set>

#include "gridbench/domains.hpp"
#include "gridbench/environment.hpp"
#include "gridbench/errors.hpp"

namespace gridbench {

using json = nlohmann::json;

namespace {

// Bad arguments; becomes an in-band error result.
struct ToolError {
  std::string message;
};

ToolResult success(json payload) { return {true, std::move(payload)}; }
ToolResult failure(std::string_view message) { return {false, std::string(message)}; }

std::int64_t int_arg(const json& args, const char* name) {
  auto it = args.find(name);
  if (it == args.end()) throw ToolError{std::string("missing argument '") + name + "'"};
  if (it->is_number_integer()) return it->get<std::int64_t>();
  if (it->is_string()) {
    const auto& s = it->get_ref<const std::string&>();
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
  }
  throw ToolError{std::string("argument '") + name + "' must be an integer"};
}

std::string string_arg(const json& args, const char* name) {
  auto it = args.find(name);
  if (it == args.end()) throw ToolError{std::string("missing argument '") + name + "'"};
  if (!it->is_string()) throw ToolError{std::string("argument '") + name + "' must be a string"};
  return it->get<std::string>();
}

json cell_payload(Cell cell, const std::optional<std::string>& id) {
  return json{{"row", cell.row}, {"col", cell.col}, {"item_id", id ? json(*id) : json(nullptr)}};
}

json attr_json(const AttrValue& v) {
  if (const auto* n = std::get_if<std::int64_t>(&v)) return *n;
  return std::get<std::string>(v);
}

}  // namespace

Episode::Episode(const Instance& instance, double fail_rate, std::uint64_t seed)
    : instance_(&instance),
      fail_rate_(fail_rate),
      rng_(Rng::derive(seed, "failure-injection")),
      grid_(instance.base_grid()),
      global_budget_(instance.global_check_budget),
      names_(tool_names(instance.domain)) {
  if (!(fail_rate >= 0.0 && fail_rate <= 1.0)) throw PreconditionError("failure rate must be in [0, 1]");
  for (std::size_t i = 0; i < instance.hidden.size(); ++i) {
    slot_budgets_.push_back(instance.hidden[i].query_budget);
    for (const auto& id : instance.hidden[i].candidates) candidate_slots_[id].push_back(i);
  }
  for (std::size_t i = 0; i < instance.prefilled.size(); ++i) prefilled_ids_[instance.prefilled[i].item_id] = i;
}

int Episode::query_budget(Cell cell) const {
  for (std::size_t i = 0; i < instance_->hidden.size(); ++i) {
    if (instance_->hidden[i].cell == cell) return slot_budgets_[i];
  }
  throw PreconditionError("cell " + to_string(cell) + " is not hidden");
}

ToolResult Episode::dispatch(const ToolCall& call) {
  TranscriptEntry entry{call, {}, false};
  if (done_) {
    entry.result = failure("episode is finished; no further calls are accepted");
  } else if (rng_.unit() < fail_rate_) {
    entry.result = failure(kInjectedFailure);
    entry.injected = true;
    ++injected_;
  } else {
    try {
      entry.result = execute(call);
    } catch (const ToolError& e) {
      entry.result = failure(e.message);
    }
  }
  transcript_.push_back(entry);
  return entry.result;
}

std::size_t Episode::hidden_index(Cell cell) const {
  if (!grid_.contains(cell)) {
    throw ToolError{"cell (" + to_string(cell) + ") is outside the " + std::to_string(grid_.rows()) + "x" +
                    std::to_string(grid_.cols()) + " grid"};
  }
  for (std::size_t i = 0; i < instance_->hidden.size(); ++i) {
    if (instance_->hidden[i].cell == cell) return i;
  }
  throw ToolError{"cell (" + to_string(cell) + ") is not hidden"};
}

ToolResult Episode::execute(const ToolCall& call) {
  json args = call.arguments.is_null() ? json::object() : call.arguments;
  if (!args.is_object()) throw ToolError{"arguments must be a JSON object"};

  const auto& n = names_;
  if (call.name == n[0]) return set_slot(args);
  if (call.name == n[1]) return grid_state();
  if (call.name == n[2]) return slot_id(args);
  if (call.name == n[3]) return slot_budget(args);
  if (call.name == n[4]) return success(json{{"remaining", global_budget_}});
  if (call.name == n[5]) {
    done_ = true;
    return success(json{{"done", true}});
  }
  if (call.name == n[6]) return query_candidates(args);
  if (call.name == n[7]) return item_info(args);
  if (call.name == n[8]) return item_attributes(args);
  if (call.name == n[9]) return check_slot(args);
  if (call.name == n[10]) return check_global();
  throw ToolError{"unknown tool; use one of the declared tools for domain " + instance_->domain};
}

namespace {

Cell cell_arg(const json& args) {
  return Cell{static_cast<int>(int_arg(args, "row")), static_cast<int>(int_arg(args, "col"))};
}

}  // namespace

ToolResult Episode::set_slot(const json& args) {
  const Cell cell = cell_arg(args);
  const auto& slot = instance_->hidden[hidden_index(cell)];
  auto it = args.find("id");
  if (it == args.end() || it->is_null() || (it->is_string() && it->get_ref<const std::string&>().empty())) {
    grid_.set(cell, std::nullopt);
    return success(cell_payload(cell, std::nullopt));
  }
  if (!it->is_string()) throw ToolError{"argument 'id' must be a string or null"};
  const auto& id = it->get_ref<const std::string&>();
  if (std::find(slot.candidates.begin(), slot.candidates.end(), id) == slot.candidates.end()) {
    throw ToolError{"that id is not a candidate for slot (" + to_string(cell) + ")"};
  }
  grid_.set(cell, id);
  return success(cell_payload(cell, id));
}

ToolResult Episode::grid_state() const {
  json rows = json::array();
  for (int r = 0; r < grid_.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < grid_.cols(); ++c) {
      const auto& id = grid_.at({r, c});
      row.push_back(id ? json(*id) : json(nullptr));
    }
    rows.push_back(std::move(row));
  }
  return success(json{{"rows", grid_.rows()}, {"cols", grid_.cols()}, {"grid", std::move(rows)}});
}

ToolResult Episode::slot_id(const json& args) const {
  const Cell cell = cell_arg(args);
  if (!grid_.contains(cell)) throw ToolError{"cell (" + to_string(cell) + ") is outside the grid"};
  return success(cell_payload(cell, grid_.at(cell)));
}

ToolResult Episode::slot_budget(const json& args) const {
  const Cell cell = cell_arg(args);
  const auto i = hidden_index(cell);
  return success(json{{"row", cell.row}, {"col", cell.col}, {"remaining", slot_budgets_[i]}});
}

ToolResult Episode::query_candidates(const json& args) {
  const Cell cell = cell_arg(args);
  const auto i = hidden_index(cell);
  const auto& dom = schema(instance_->domain);
  const auto field = string_arg(args, "field");
  if (!dom.has_field(field)) throw ToolError{"unknown attribute for domain " + instance_->domain};
  const auto op_text = string_arg(args, "operator");

  SlotConstraint c;
  c.field = field;
  if (op_text == "<=") {
    c.op = Comparator::LE;
  } else if (op_text == ">=") {
    c.op = Comparator::GE;
  } else if (op_text == "==" || op_text == "=") {
    c.op = Comparator::EQ;
  } else if (op_text == "!=") {
    c.op = Comparator::NE;
  } else if (op_text == "in") {
    c.op = Comparator::IN;
  } else {
    throw ToolError{"operator must be one of <=, >=, ==, !=, in"};
  }

  auto vit = args.find("value");
  if (vit == args.end()) throw ToolError{"missing argument 'value'"};
  const bool numeric = dom.numeric(field) != nullptr;
  if (c.op == Comparator::IN) {
    if (!vit->is_array() || !std::all_of(vit->begin(), vit->end(), [](const json& v) { return v.is_string(); })) {
      throw ToolError{"'in' needs a list of category names"};
    }
    c.value = vit->get<std::vector<std::string>>();
  } else if (numeric) {
    c.value = int_arg(args, "value");
  } else {
    if (!vit->is_string()) throw ToolError{"value for a categorical attribute must be a string"};
    c.value = vit->get<std::string>();
  }
  try {
    check_constraint(c, dom);
  } catch (const SchemaError&) {
    throw ToolError{"operator does not apply to attribute '" + field + "'"};
  }

  if (slot_budgets_[i] <= 0) return failure(kBudgetExhausted);
  --slot_budgets_[i];
  json ids = json::array();
  for (const auto& id : instance_->hidden[i].candidates) {
    if (eval_slot(lookup_item(instance_->items, id), c)) ids.push_back(id);
  }
  return success(json{{"row", cell.row}, {"col", cell.col}, {"ids", std::move(ids)}});
}

ToolResult Episode::item_info(const json& args) const {
  const auto id = string_arg(args, "id");
  if (!instance_->items.contains(id)) throw ToolError{"unknown item id"};
  if (!prefilled_ids_.contains(id)) {
    throw ToolError{"item " + id + " is not in a pre-filled cell; use " + names_[8] + " for candidates"};
  }
  const auto& item = lookup_item(instance_->items, id);
  json attrs = json::object();
  for (const auto& [name, value] : item.attributes) attrs[name] = attr_json(value);
  return success(json{{"id", id}, {"name", item.name}, {"attributes", std::move(attrs)}});
}

ToolResult Episode::item_attributes(const json& args) {
  auto it = args.find("ids");
  if (it == args.end()) throw ToolError{"missing argument 'ids'"};
  std::vector<std::string> ids;
  if (it->is_string()) {
    ids.push_back(it->get<std::string>());
  } else if (it->is_array() && std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_string(); })) {
    ids = it->get<std::vector<std::string>>();
  } else {
    throw ToolError{"argument 'ids' must be a list of item ids"};
  }
  const auto field = string_arg(args, "field");
  if (!schema(instance_->domain).has_field(field)) throw ToolError{"unknown attribute for domain " + instance_->domain};
  for (const auto& id : ids) {
    if (!instance_->items.contains(id)) throw ToolError{"unknown item id in 'ids'"};
  }

  std::set<std::size_t> slots;
  for (const auto& id : ids) {
    if (auto s = candidate_slots_.find(id); s != candidate_slots_.end()) slots.insert(s->second.begin(), s->second.end());
  }
  for (auto s : slots) {
    if (slot_budgets_[s] <= 0) return failure(kBudgetExhausted);
  }
  for (auto s : slots) --slot_budgets_[s];

  json values = json::object();
  for (const auto& id : ids) values[id] = attr_json(lookup_item(instance_->items, id).attribute(field));
  return success(json{{"field", field}, {"values", std::move(values)}});
}

ToolResult Episode::check_slot(const json& args) const {
  const Cell cell = cell_arg(args);
  const auto& slot = instance_->hidden[hidden_index(cell)];
  const auto& id = grid_.at(cell);
  const bool ok = id && eval_slot(lookup_item(instance_->items, *id), slot.constraints);
  return success(json{{"row", cell.row}, {"col", cell.col}, {"satisfied", ok}});
}

ToolResult Episode::check_global() {
  if (global_budget_ <= 0) return failure(kBudgetExhausted);
  --global_budget_;
  const bool ok = grid_.is_full() ? eval_global_full(grid_, instance_->items, instance_->global_constraints)
                                  : eval_global_open_prefix(grid_, instance_->items, instance_->global_constraints);
  return success(json{{"satisfied", ok}});
}

EpisodeScore score_episode(const Episode& episode, const AnswerKey& key) {
  const auto& hidden = episode.instance().hidden;
  int matches = 0;
  for (const auto& slot : hidden) {
    const auto& placed = episode.grid().at(slot.cell);
    auto it = key.truth.find(slot.cell);
    if (placed && it != key.truth.end() && *placed == it->second) ++matches;
  }
  EpisodeScore score;
  score.reward = (!hidden.empty() && matches == static_cast<int>(hidden.size())) ? 1 : 0;
  score.partial_credit = hidden.empty() ? 0.0 : static_cast<double>(matches) / static_cast<double>(hidden.size());
  return score;
}

}  // namespace gridbench
