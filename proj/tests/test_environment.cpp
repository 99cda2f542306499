#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gridbench/agents.hpp"
#include "gridbench/environment.hpp"
#include "gridbench/errors.hpp"
#include "gridbench/generator.hpp"

using namespace gridbench;
using json = nlohmann::json;

namespace {

// 1x3 course grid. (0,1) is hidden with the constraints of the worked
// example; C443 is its truth, seven items pass locally, 17 fail on price.
struct ExampleSlot {
  Instance inst;
  AnswerKey key;

  ExampleSlot() {
    inst.domain = "course";
    inst.rows = 1;
    inst.cols = 3;
    inst.h = 1;
    inst.b = 7;
    inst.b_requested = 7;
    inst.k = 25;
    inst.global_check_budget = 2;
    auto add = [&](Item it) { inst.items[it.id] = it; };
    add(fixtures::course_item("C1", 3, 200, 2));
    add(fixtures::course_item("C2", 3, 210, 2));
    inst.prefilled = {{{0, 0}, "C1"}, {{0, 2}, "C2"}};
    HiddenSlot slot{{0, 1},
                    {{"difficulty", Comparator::LE, std::int64_t{4}}, {"price", Comparator::LE, std::int64_t{460}}},
                    {},
                    3};
    add(fixtures::course_item("C443", 4, 379, 1));
    slot.candidates.push_back("C443");
    key.truth[{0, 1}] = "C443";
    for (int i = 0; i < 7; ++i) {
      const auto id = "C" + std::to_string(1100 + i);
      add(fixtures::course_item(id, 2, 390 + i, 2));
      slot.candidates.push_back(id);
      key.decoys[{0, 1}].push_back(id);
    }
    for (int i = 0; i < 17; ++i) {
      const auto id = "C" + std::to_string(700 + i);
      add(fixtures::course_item(id, 4, 461 + i, 1));
      slot.candidates.push_back(id);
      key.filters[{0, 1}].push_back(id);
    }
    inst.hidden.push_back(slot);
    inst.global_constraints = {{GlobalKind::SumUpper, "price", "", 200 + 210 + 379 + 5},
                               {GlobalKind::SumLower, "credits", "", 10}};
    key.allocations = {{{0, 1}, 7}};
  }
};

ToolCall call(const std::string& name, json args = json::object()) { return ToolCall{"", name, std::move(args)}; }

std::string message(const ToolResult& r) { return r.payload.is_string() ? r.payload.get<std::string>() : r.payload.dump(); }

}  // namespace

TEST(ToolCatalog, ElevenTools) {
  const auto names = tool_names("course");
  ASSERT_EQ(names.size(), 11u);
  EXPECT_EQ(names[0], "set_slot");
  EXPECT_EQ(names[5], "done");
  EXPECT_EQ(names[6], "query_course_candidate_from_attribute");
  EXPECT_EQ(names[10], "check_course_global_constraints");
  const auto catalog = tool_catalog("pc_build");
  ASSERT_EQ(catalog.size(), 11u);
  for (const auto& t : catalog) {
    EXPECT_EQ(t["type"], "function");
    EXPECT_TRUE(t["function"]["name"].is_string());
    EXPECT_TRUE(t["function"]["description"].is_string());
    EXPECT_EQ(t["function"]["parameters"]["type"], "object");
  }
  EXPECT_EQ(catalog[8]["function"]["name"], "get_pc_build_item_attributes");
}

TEST(Episode, StartsFromInstanceBudgets) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  EXPECT_EQ(ep.query_budget({0, 1}), 3);
  EXPECT_EQ(ep.global_check_budget(), 2);
  EXPECT_EQ(ep.steps(), 0);
  EXPECT_FALSE(ep.done());
  EXPECT_THROW(ep.query_budget({0, 0}), PreconditionError);
  EXPECT_THROW(Episode(ex.inst, 1.5, 1), PreconditionError);
}

TEST(Episode, QueryKeepsTruthDropsFilters) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  const auto r = ep.dispatch(call("query_course_candidate_from_attribute",
                                  {{"row", 0}, {"col", 1}, {"field", "price"}, {"operator", "<="}, {"value", 460}}));
  ASSERT_TRUE(r.ok) << message(r);
  const auto ids = r.payload["ids"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(ids.begin(), ids.end(), "C443"), ids.end());
  for (const auto& f : ex.key.filters.at({0, 1})) EXPECT_EQ(std::find(ids.begin(), ids.end(), f), ids.end());
  EXPECT_EQ(ids.size(), 8u);
  EXPECT_EQ(ep.query_budget({0, 1}), 2);
}

TEST(Episode, QueryRejectsBadArguments) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  const std::string q = "query_course_candidate_from_attribute";
  EXPECT_FALSE(ep.dispatch(call(q, {{"row", 0}, {"col", 1}, {"field", "colour"}, {"operator", "<="}, {"value", 1}})).ok);
  EXPECT_FALSE(ep.dispatch(call(q, {{"row", 0}, {"col", 1}, {"field", "price"}, {"operator", "~"}, {"value", 1}})).ok);
  EXPECT_FALSE(ep.dispatch(call(q, {{"row", 0}, {"col", 1}, {"field", "teacher"}, {"operator", "<="}, {"value", 1}})).ok);
  EXPECT_FALSE(ep.dispatch(call(q, {{"row", 0}, {"col", 0}, {"field", "price"}, {"operator", "<="}, {"value", 1}})).ok);
  EXPECT_FALSE(ep.dispatch(call(q, {{"row", 9}, {"col", 1}, {"field", "price"}, {"operator", "<="}, {"value", 1}})).ok);
  // Rejected calls cost a step but no budget.
  EXPECT_EQ(ep.steps(), 5);
  EXPECT_EQ(ep.query_budget({0, 1}), 3);
  const auto in = ep.dispatch(
      call(q, {{"row", 0}, {"col", 1}, {"field", "teacher"}, {"operator", "in"}, {"value", {"Lee", "Kim"}}}));
  EXPECT_TRUE(in.ok) << message(in);
}

TEST(Episode, BudgetExhaustion) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  const json q{{"row", 0}, {"col", 1}, {"field", "price"}, {"operator", ">="}, {"value", 0}};
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(ep.dispatch(call("query_course_candidate_from_attribute", q)).ok);
  const auto r = ep.dispatch(call("query_course_candidate_from_attribute", q));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(message(r), kBudgetExhausted);
  EXPECT_EQ(ep.query_budget({0, 1}), 0);
  const auto a = ep.dispatch(call("get_course_item_attributes", {{"ids", {"C443"}}, {"field", "price"}}));
  EXPECT_EQ(message(a), kBudgetExhausted);
  // Pre-filled items touch no slot budget.
  EXPECT_TRUE(ep.dispatch(call("get_course_item_attributes", {{"ids", {"C1"}}, {"field", "price"}})).ok);

  EXPECT_TRUE(ep.dispatch(call("check_course_global_constraints")).ok);
  EXPECT_TRUE(ep.dispatch(call("check_course_global_constraints")).ok);
  EXPECT_EQ(message(ep.dispatch(call("check_course_global_constraints"))), kBudgetExhausted);
  EXPECT_EQ(ep.global_check_budget(), 0);
}

TEST(Episode, AttributeReadsChargeEachTouchedSlot) {
  const auto [inst, key] = generate(fixtures::small_config(5, 3, 0, 25));
  Episode ep(inst, 0.0, 1);
  const auto& a = inst.hidden[0];
  const auto& b = inst.hidden[1];
  const auto r = ep.dispatch(call(tool_names("course")[8],
                                  {{"ids", {a.candidates[0], a.candidates[1], b.candidates[0]}}, {"field", "credits"}}));
  ASSERT_TRUE(r.ok) << message(r);
  EXPECT_EQ(r.payload["values"].size(), 3u);
  EXPECT_EQ(ep.query_budget(a.cell), inst.hidden[0].query_budget - 1);
  EXPECT_EQ(ep.query_budget(b.cell), inst.hidden[1].query_budget - 1);
  EXPECT_EQ(ep.query_budget(inst.hidden[2].cell), inst.hidden[2].query_budget);
  EXPECT_FALSE(ep.dispatch(call(tool_names("course")[8], {{"ids", {"C0"}}, {"field", "credits"}})).ok);
}

TEST(Episode, ItemInfoOnlyForPrefilled) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  const auto ok = ep.dispatch(call("get_course_item_info", {{"id", "C1"}}));
  ASSERT_TRUE(ok.ok);
  EXPECT_EQ(ok.payload["attributes"]["price"], 200);
  EXPECT_EQ(ok.payload["attributes"].size(), 6u);
  EXPECT_FALSE(ep.dispatch(call("get_course_item_info", {{"id", "C443"}})).ok);
  EXPECT_FALSE(ep.dispatch(call("get_course_item_info", {{"id", "C9999"}})).ok);
}

TEST(Episode, SetSlotRules) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  const auto pre = ep.dispatch(call("set_slot", {{"row", 0}, {"col", 0}, {"id", "C443"}}));
  EXPECT_FALSE(pre.ok);
  EXPECT_NE(message(pre).find("is not hidden"), std::string::npos) << message(pre);
  EXPECT_FALSE(ep.dispatch(call("set_slot", {{"row", 0}, {"col", 7}, {"id", "C443"}})).ok);
  EXPECT_FALSE(ep.dispatch(call("set_slot", {{"row", 0}, {"col", 1}, {"id", "C1"}})).ok);
  EXPECT_TRUE(ep.dispatch(call("set_slot", {{"row", 0}, {"col", 1}, {"id", "C443"}})).ok);
  EXPECT_EQ(ep.grid().at({0, 1}), std::optional<std::string>("C443"));
  EXPECT_EQ(ep.grid().at({0, 0}), std::optional<std::string>("C1"));
  EXPECT_TRUE(ep.dispatch(call("set_slot", {{"row", 0}, {"col", 1}})).ok);
  EXPECT_FALSE(ep.grid().at({0, 1}).has_value());
}

TEST(Episode, ReadsShowGridAndNeverMutate) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  auto state = ep.dispatch(call("get_current_grid_state"));
  ASSERT_TRUE(state.ok);
  EXPECT_EQ(state.payload["grid"], json::parse(R"([["C1", null, "C2"]])"));
  ep.dispatch(call("set_slot", {{"row", 0}, {"col", 1}, {"id", "C1100"}}));
  const auto before = ep.grid();
  ep.dispatch(call("get_slot_id", {{"row", 0}, {"col", 1}}));
  ep.dispatch(call("get_hidden_slot_query_budget", {{"row", 0}, {"col", 1}}));
  ep.dispatch(call("get_global_check_budget"));
  ep.dispatch(call("check_course_slot_constraints", {{"row", 0}, {"col", 1}}));
  ep.dispatch(call("check_course_global_constraints"));
  ep.dispatch(call("get_course_item_info", {{"id", "C2"}}));
  EXPECT_EQ(ep.grid(), before);
  EXPECT_EQ(ep.dispatch(call("get_slot_id", {{"row", 0}, {"col", 1}})).payload["item_id"], "C1100");
  EXPECT_EQ(ep.dispatch(call("get_hidden_slot_query_budget", {{"row", 0}, {"col", 1}})).payload["remaining"], 3);
}

TEST(Episode, ChecksAreBooleanOnly) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  auto slot = ep.dispatch(call("check_course_slot_constraints", {{"row", 0}, {"col", 1}}));
  EXPECT_EQ(slot.payload["satisfied"], false);
  ep.dispatch(call("set_slot", {{"row", 0}, {"col", 1}, {"id", "C443"}}));
  slot = ep.dispatch(call("check_course_slot_constraints", {{"row", 0}, {"col", 1}}));
  EXPECT_EQ(slot.payload["satisfied"], true);
  EXPECT_EQ(ep.dispatch(call("check_course_global_constraints")).payload, json({{"satisfied", true}}));
  ep.dispatch(call("set_slot", {{"row", 0}, {"col", 1}, {"id", "C1106"}}));
  EXPECT_EQ(ep.dispatch(call("check_course_global_constraints")).payload, json({{"satisfied", false}}));
}

TEST(Episode, PartialGridChecksUpperBoundsOnly) {
  const auto [inst, key] = generate(fixtures::small_config(2, 5, 0, 25));
  Episode ep(inst, 0.0, 1);
  EXPECT_EQ(ep.dispatch(call("check_course_global_constraints")).payload["satisfied"], true);
  for (const auto& [cell, id] : key.truth) {
    ep.dispatch(call("set_slot", {{"row", cell.row}, {"col", cell.col}, {"id", id}}));
  }
  EXPECT_EQ(ep.dispatch(call("check_course_global_constraints")).payload["satisfied"], true);
}

TEST(Episode, DoneStopsTheEpisode) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  EXPECT_TRUE(ep.dispatch(call("done")).ok);
  EXPECT_TRUE(ep.done());
  EXPECT_FALSE(ep.dispatch(call("get_current_grid_state")).ok);
  EXPECT_EQ(ep.steps(), 2);
}

TEST(Episode, UnknownToolIsInBand) {
  ExampleSlot ex;
  Episode ep(ex.inst, 0.0, 1);
  const auto r = ep.dispatch(call("reveal_truth"));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(message(r).find("truth"), std::string::npos);
  EXPECT_FALSE(ep.dispatch(call("get_slot_id", json::array({1, 2}))).ok);
  EXPECT_FALSE(ep.dispatch(call("get_slot_id", {{"row", "x"}, {"col", 1}})).ok);
  EXPECT_EQ(ep.steps(), 3);
}

TEST(Episode, InjectionIsSeededAndFree) {
  ExampleSlot ex;
  Episode zero(ex.inst, 0.0, 3);
  for (int i = 0; i < 1000; ++i) zero.dispatch(call("get_global_check_budget"));
  EXPECT_EQ(zero.injected_failures(), 0);

  auto run = [&](std::uint64_t seed) {
    Episode ep(ex.inst, 0.3, seed);
    std::vector<bool> pattern;
    const json q{{"row", 0}, {"col", 1}, {"field", "price"}, {"operator", "<="}, {"value", 460}};
    for (int i = 0; i < 200; ++i) {
      const int before = ep.query_budget({0, 1});
      const int steps = ep.steps();
      const auto r = ep.dispatch(call("query_course_candidate_from_attribute", q));
      const bool injected = ep.transcript().back().injected;
      pattern.push_back(injected);
      EXPECT_EQ(ep.steps(), steps + 1);
      if (injected) {
        EXPECT_EQ(message(r), kInjectedFailure);
        EXPECT_EQ(ep.query_budget({0, 1}), before);
      }
    }
    return pattern;
  };
  EXPECT_EQ(run(9), run(9));
  EXPECT_NE(run(9), run(10));
}

TEST(Episode, ReplayReproducesResults) {
  const auto [inst, key] = generate(fixtures::small_config(7, 5, 6, 25));
  Episode first(inst, 0.3, 77);
  FuzzAgent agent(inst, 5);
  const std::string prompt;
  const json tools = tool_catalog(inst.domain);
  for (int i = 0; i < 400 && !first.done(); ++i) {
    const AgentView view{inst, prompt, tools, first.transcript()};
    for (const auto& c : agent.act(view).calls) first.dispatch(c);
  }
  Episode replay(inst, 0.3, 77);
  for (const auto& e : first.transcript()) {
    const auto r = replay.dispatch(e.call);
    ASSERT_EQ(r.ok, e.result.ok);
    ASSERT_EQ(r.payload.dump(), e.result.payload.dump());
  }
}

TEST(Score, ExactTruthMatch) {
  const auto [inst, key] = generate(fixtures::small_config(3, 5, 8, 25));
  Episode ep(inst, 0.0, 1);
  EXPECT_EQ(score_episode(ep, key).reward, 0);
  for (const auto& [cell, id] : key.truth) {
    ep.dispatch(call("set_slot", {{"row", cell.row}, {"col", cell.col}, {"id", id}}));
  }
  EXPECT_EQ(score_episode(ep, key).reward, 1);
  EXPECT_DOUBLE_EQ(score_episode(ep, key).partial_credit, 1.0);

  const auto cell = key.allocations.front().cell;
  ep.dispatch(call("set_slot", {{"row", cell.row}, {"col", cell.col}, {"id", key.decoys.at(cell).front()}}));
  const auto s = score_episode(ep, key);
  EXPECT_EQ(s.reward, 0);
  EXPECT_DOUBLE_EQ(s.partial_credit, 4.0 / 5.0);
  EXPECT_FALSE(eval_global_full(ep.grid(), inst.items, inst.global_constraints));
}
