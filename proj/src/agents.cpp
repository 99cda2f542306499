#include "gridbench/agents.hpp"

#include <algorithm>

#include "gridbench/domains.hpp"

namespace gridbench {

using json = nlohmann::json;

namespace {

ToolCall make_call(std::string name, json args) { return ToolCall{"", std::move(name), std::move(args)}; }

json cell_args(Cell cell) { return json{{"row", cell.row}, {"col", cell.col}}; }

bool injected(const ToolResult& r) {
  return !r.ok && r.payload.is_string() && r.payload.get_ref<const std::string&>() == kInjectedFailure;
}

// Stores one batch attribute read into partial items keyed by id.
void remember(std::map<std::string, Item>& seen, const ToolResult& r) {
  if (!r.ok) return;
  const auto& field = r.payload.at("field").get_ref<const std::string&>();
  for (const auto& [id, v] : r.payload.at("values").items()) {
    auto& item = seen[id];
    item.id = id;
    if (v.is_number_integer()) {
      item.attributes[field] = v.get<std::int64_t>();
    } else {
      item.attributes[field] = v.get<std::string>();
    }
  }
}

// Candidates passing every constraint whose field is known; unknown fields pass.
std::vector<std::string> locally_valid(const HiddenSlot& slot, const std::map<std::string, Item>& seen) {
  std::vector<std::string> out;
  for (const auto& id : slot.candidates) {
    auto it = seen.find(id);
    const bool ok = std::all_of(slot.constraints.begin(), slot.constraints.end(), [&](const SlotConstraint& c) {
      if (it == seen.end() || !it->second.attributes.contains(c.field)) return true;
      return eval_slot(it->second, c);
    });
    if (ok) out.push_back(id);
  }
  return out;
}

}  // namespace

AgentTurn ScriptedAgent::act(const AgentView& view) {
  if (issued_) {
    issued_ = false;
    const auto& last = view.transcript.back().result;
    if (injected(last) && retries()) {
      issued_ = true;
      return AgentTurn{{queue_.front().call}, "", 0, false};
    }
    const Pending done = std::move(queue_.front());
    queue_.pop_front();
    absorb(done, last);
  }
  if (queue_.empty()) plan(view.instance);
  if (queue_.empty()) return AgentTurn{{}, "finished", 0, false};
  issued_ = true;
  return AgentTurn{{queue_.front().call}, "", 0, false};
}

OracleAgent::OracleAgent(const Instance& instance)
    : seen_(instance.hidden.size()),
      fallback_(instance.hidden.size(), false),
      valid_(instance.hidden.size()),
      choice_(instance.hidden.size(), 0) {}

void OracleAgent::absorb(const Pending& done, const ToolResult& result) {
  switch (done.kind) {
    case kRead:
      if (result.ok) {
        remember(seen_[done.slot], result);
      } else {
        fallback_[done.slot] = true;
      }
      break;
    case kProbe:
      if (result.ok && result.payload.at("satisfied").get<bool>()) valid_[done.slot].push_back(done.arg);
      break;
    case kCheckGlobal:
      if (result.ok) {
        global_ok_ = result.payload.at("satisfied").get<bool>();
      } else {
        global_spent_ = true;
      }
      break;
    default:
      break;
  }
}

bool OracleAgent::advance() {
  changed_.clear();
  for (std::size_t j = choice_.size(); j-- > 0;) {
    if (choice_[j] + 1 < valid_[j].size()) {
      ++choice_[j];
      changed_.push_back(j);
      for (std::size_t k = j + 1; k < choice_.size(); ++k) {
        if (choice_[k] != 0) changed_.push_back(k);
        choice_[k] = 0;
      }
      return true;
    }
  }
  return false;
}

void OracleAgent::plan(const Instance& instance) {
  const auto& names = tool_names(instance.domain);
  auto place = [&](std::size_t s, const std::string& id) {
    auto args = cell_args(instance.hidden[s].cell);
    args["id"] = id;
    queue_.push_back({make_call(names[0], std::move(args)), kSet, s, id});
  };

  while (queue_.empty() && stage_ != Stage::Finished) {
    switch (stage_) {
      case Stage::Read: {
        if (slot_ >= instance.hidden.size()) {
          stage_ = Stage::Check;
          break;
        }
        const auto& slot = instance.hidden[slot_];
        for (const auto& c : slot.constraints) {
          queue_.push_back({make_call(names[8], json{{"ids", slot.candidates}, {"field", c.field}}), kRead, slot_, c.field});
        }
        stage_ = Stage::Filter;
        break;
      }
      case Stage::Filter: {
        const auto& slot = instance.hidden[slot_];
        if (!fallback_[slot_]) {
          valid_[slot_] = locally_valid(slot, seen_[slot_]);
          if (valid_[slot_].empty()) fallback_[slot_] = true;
        }
        if (fallback_[slot_]) {
          valid_[slot_].clear();
          for (const auto& id : slot.candidates) {
            place(slot_, id);
            queue_.push_back({make_call(names[9], cell_args(slot.cell)), kProbe, slot_, id});
          }
          stage_ = Stage::Settle;
        } else {
          place(slot_, valid_[slot_].front());
          ++slot_;
          stage_ = Stage::Read;
        }
        break;
      }
      case Stage::Settle:
        if (valid_[slot_].empty()) valid_[slot_] = instance.hidden[slot_].candidates;
        place(slot_, valid_[slot_].front());
        ++slot_;
        stage_ = Stage::Read;
        break;
      case Stage::Check:
        queue_.push_back({make_call(names[10], json::object()), kCheckGlobal, 0, ""});
        stage_ = Stage::Judge;
        break;
      case Stage::Judge:
        if (global_ok_ || global_spent_ || !advance()) {
          queue_.push_back({make_call(names[5], json::object()), kDone, 0, ""});
          stage_ = Stage::Finished;
        } else {
          for (auto s : changed_) place(s, valid_[s][choice_[s]]);
          stage_ = Stage::Check;
        }
        break;
      case Stage::Finished:
        break;
    }
  }
}

RandomValidAgent::RandomValidAgent(const Instance&, std::uint64_t seed) : rng_(seed) {}

void RandomValidAgent::absorb(const Pending& done, const ToolResult& result) {
  if (done.kind == kRead) remember(seen_, result);
}

void RandomValidAgent::plan(const Instance& instance) {
  if (finished_) return;
  const auto& names = tool_names(instance.domain);
  if (slot_ >= instance.hidden.size()) {
    queue_.push_back({make_call(names[5], json::object()), kDone, 0, ""});
    finished_ = true;
    return;
  }
  const auto& slot = instance.hidden[slot_];
  if (reading_) {
    for (const auto& c : slot.constraints) {
      queue_.push_back({make_call(names[8], json{{"ids", slot.candidates}, {"field", c.field}}), kRead, slot_, c.field});
    }
    reading_ = false;
    return;
  }
  auto valid = locally_valid(slot, seen_);
  if (valid.empty()) valid = slot.candidates;
  auto args = cell_args(slot.cell);
  args["id"] = rng_.pick(valid);
  queue_.push_back({make_call(names[0], std::move(args)), kSet, slot_, ""});
  seen_.clear();
  reading_ = true;
  ++slot_;
}

AgentTurn LoopingAgent::act(const AgentView& view) {
  return AgentTurn{{make_call(tool_names(view.instance.domain)[1], json::object())}, "", 0, false};
}

FuzzAgent::FuzzAgent(const Instance& instance, std::uint64_t seed) : rng_(seed) {
  for (const auto& slot : instance.hidden) ids_.insert(ids_.end(), slot.candidates.begin(), slot.candidates.end());
  for (const auto& p : instance.prefilled) ids_.push_back(p.item_id);
  // Strings an agent might guess at.
  for (const char* s : {"truth", "decoy", "filter", "answer", "", "C1", "ZZZ999", "0"}) ids_.emplace_back(s);
}

AgentTurn FuzzAgent::act(const AgentView& view) {
  const auto& inst = view.instance;
  auto names = tool_names(inst.domain);
  for (const char* s : {"get_truth", "list_decoys", "filter_slot", "get_answer_key"}) names.emplace_back(s);
  auto fields = schema(inst.domain).field_names();
  for (const char* s : {"truth", "filter", "id", "name"}) fields.emplace_back(s);
  static const std::vector<std::string> ops{"<=", ">=", "==", "!=", "in", "<", "truth"};

  auto name = rng_.pick(names);
  // Keep episodes long enough to produce many results.
  if (name == names[5] && rng_.chance(0.9)) name = names[1];

  json args = json::object();
  auto coord = [&](int n) -> json {
    switch (rng_.below(8)) {
      case 0:
        return -1;
      case 1:
        return n;
      case 2:
        return std::to_string(rng_.below(static_cast<std::uint64_t>(n)));
      case 3:
        return "decoy";
      default:
        return static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
    }
  };
  if (rng_.chance(0.6) && !inst.hidden.empty()) {
    const auto cell = inst.hidden[rng_.below(inst.hidden.size())].cell;
    args["row"] = cell.row;
    args["col"] = cell.col;
  } else {
    args["row"] = coord(inst.rows);
    args["col"] = coord(inst.cols);
  }
  if (rng_.chance(0.8)) args["id"] = rng_.pick(ids_);
  json ids = json::array();
  const auto n = rng_.between(0, 6);
  for (std::int64_t i = 0; i < n; ++i) ids.push_back(rng_.pick(ids_));
  args["ids"] = rng_.chance(0.1) ? json(rng_.pick(ids_)) : ids;
  args["field"] = rng_.pick(fields);
  args["operator"] = rng_.pick(ops);
  switch (rng_.below(4)) {
    case 0:
      args["value"] = rng_.between(-5, 1600);
      break;
    case 1:
      args["value"] = rng_.pick(ids_);
      break;
    case 2: {
      const auto& cats = schema(inst.domain).categorical_fields.front().categories;
      args["value"] = json::array({rng_.pick(cats), "truth"});
      break;
    }
    default:
      args["value"] = schema(inst.domain).categorical_fields.back().categories.front();
      break;
  }
  if (rng_.chance(0.05)) args = json::array({1, 2});
  return AgentTurn{{make_call(name, std::move(args))}, "", 0, false};
}

TruncatingAgent::TruncatingAgent(std::unique_ptr<Agent> inner, int truncations, int tokens_per_turn)
    : inner_(std::move(inner)), remaining_(truncations), tokens_(tokens_per_turn) {}

AgentTurn TruncatingAgent::act(const AgentView& view) {
  if (remaining_ > 0) {
    --remaining_;
    return AgentTurn{{}, "", tokens_, true};
  }
  auto turn = inner_->act(view);
  turn.completion_tokens += tokens_;
  return turn;
}

}  // namespace gridbench
