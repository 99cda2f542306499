#include "gridbench/environment.hpp"

namespace gridbench {

using json = nlohmann::json;

std::vector<std::string> tool_names(std::string_view domain) {
  const std::string d(domain);
  return {"set_slot",
          "get_current_grid_state",
          "get_slot_id",
          "get_hidden_slot_query_budget",
          "get_global_check_budget",
          "done",
          "query_" + d + "_candidate_from_attribute",
          "get_" + d + "_item_info",
          "get_" + d + "_item_attributes",
          "check_" + d + "_slot_constraints",
          "check_" + d + "_global_constraints"};
}

namespace {

json cell_props() {
  return json{{"row", {{"type", "integer"}, {"description", "Zero-based row index."}}},
              {"col", {{"type", "integer"}, {"description", "Zero-based column index."}}}};
}

json function(const std::string& name, const std::string& description, json properties,
              std::vector<std::string> required) {
  return json{{"type", "function"},
              {"function",
               {{"name", name},
                {"description", description},
                {"parameters", {{"type", "object"}, {"properties", std::move(properties)}, {"required", required}}}}}};
}

}  // namespace

json tool_catalog(std::string_view domain) {
  const auto names = tool_names(domain);
  json out = json::array();

  auto set_props = cell_props();
  set_props["id"] = {{"type", {"string", "null"}},
                     {"description", "Candidate item id to place, or null to empty the slot."}};
  out.push_back(function(names[0], "Put a candidate item into a hidden slot, or empty the slot when id is null.",
                         set_props, {"row", "col"}));
  out.push_back(function(names[1], "Show every cell of the grid; empty hidden slots appear as null.", json::object(), {}));
  out.push_back(function(names[2], "Return the item id currently in a cell, or null.", cell_props(), {"row", "col"}));
  out.push_back(function(names[3], "Remaining attribute-query budget of a hidden slot.", cell_props(), {"row", "col"}));
  out.push_back(function(names[4], "Remaining number of global constraint checks.", json::object(), {}));
  out.push_back(function(names[5], "Finish the episode. Call once every hidden slot is filled.", json::object(), {}));

  auto query_props = cell_props();
  query_props["field"] = {{"type", "string"}, {"description", "Attribute name."}};
  query_props["operator"] = {{"type", "string"}, {"enum", {"<=", ">=", "==", "!=", "in"}}};
  query_props["value"] = {{"description", "Integer for numeric attributes, category name, or a list of categories for 'in'."}};
  out.push_back(function(names[6],
                         "List the candidate ids of a hidden slot whose attribute matches `field operator value`. "
                         "Uses one unit of that slot's query budget.",
                         query_props, {"row", "col", "field", "operator", "value"}));

  out.push_back(function(names[7], "All attributes of an item placed in a pre-filled cell.",
                         json{{"id", {{"type", "string"}}}}, {"id"}));

  json attr_props{{"ids", {{"type", "array"}, {"items", {{"type", "string"}}}}}, {"field", {{"type", "string"}}}};
  out.push_back(function(names[8],
                         "One attribute for a list of item ids. Uses one unit of query budget of every hidden slot "
                         "whose candidates are among the ids.",
                         attr_props, {"ids", "field"}));
  out.push_back(function(names[9], "Whether the item in a hidden slot meets that slot's constraints.", cell_props(),
                         {"row", "col"}));
  out.push_back(function(names[10],
                         "Whether the grid meets the global constraints. While slots are empty only upper limits are "
                         "checked. Uses one unit of the global check budget.",
                         json::object(), {}));
  return out;
}

}  // namespace gridbench
