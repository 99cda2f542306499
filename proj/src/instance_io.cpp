#include <fstream>
#include <sstream>

#include "gridbench/errors.hpp"
#include "gridbench/instance.hpp"
#include "json.hpp"

namespace gridbench {

using json = nlohmann::json;

const HiddenSlot* Instance::find_hidden(Cell cell) const {
  for (const auto& slot : hidden) {
    if (slot.cell == cell) return &slot;
  }
  return nullptr;
}

GridAssignment Instance::base_grid() const {
  GridAssignment grid(rows, cols);
  for (const auto& p : prefilled) grid.set(p.cell, p.item_id);
  return grid;
}

GridAssignment AnswerKey::truth_grid(const Instance& instance) const {
  auto grid = instance.base_grid();
  for (const auto& [cell, id] : truth) grid.set(cell, id);
  return grid;
}

std::filesystem::path key_path_for(const std::filesystem::path& instance_path) {
  auto out = instance_path;
  out.replace_extension(".key.json");
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LookupError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

namespace {

// Checked accessors that report the JSON path of whatever is missing.
const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, path + "." + key + ": missing");
  return *it;
}

template <typename T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path, path + ": wrong type");
  }
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& path) {
  return get_as<T>(field(j, key, path), path + "." + key);
}

const json& array_field(const json& j, const std::string& key, const std::string& path) {
  const auto& a = field(j, key, path);
  if (!a.is_array()) throw SchemaError(path + "." + key, path + "." + key + ": expected an array");
  return a;
}

json cell_json(Cell cell, const std::string& id) { return json{{"row", cell.row}, {"col", cell.col}, {"item_id", id}}; }

Cell read_cell(const json& j, const std::string& path) {
  return Cell{get_field<int>(j, "row", path), get_field<int>(j, "col", path)};
}

json item_json(const Item& item) {
  json attrs = json::object();
  for (const auto& [name, value] : item.attributes) {
    if (const auto* n = std::get_if<std::int64_t>(&value)) {
      attrs[name] = *n;
    } else {
      attrs[name] = std::get<std::string>(value);
    }
  }
  return json{{"name", item.name}, {"attributes", std::move(attrs)}};
}

Item read_item(const std::string& id, const json& j, const std::string& path) {
  Item item;
  item.id = id;
  item.name = get_field<std::string>(j, "name", path);
  const auto& attrs = field(j, "attributes", path);
  if (!attrs.is_object()) throw SchemaError(path + ".attributes", path + ".attributes: expected an object");
  for (const auto& [name, value] : attrs.items()) {
    if (value.is_number_integer()) {
      item.attributes[name] = value.get<std::int64_t>();
    } else if (value.is_string()) {
      item.attributes[name] = value.get<std::string>();
    } else {
      throw SchemaError(path + ".attributes." + name, path + ".attributes." + name + ": expected integer or string");
    }
  }
  return item;
}

json items_json(const ItemTable& items) {
  json out = json::object();
  for (const auto& [id, item] : items) out[id] = item_json(item);
  return out;
}

template <typename Parse>
auto parse_text(const json& j, const std::string& path, Parse parse) {
  const auto text = get_as<std::string>(j, path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw SchemaError(path, path + ": " + e.what());
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string dump_document(const Instance& inst) {
  json j;
  j["domain"] = inst.domain;
  j["rows"] = inst.rows;
  j["cols"] = inst.cols;
  j["seed"] = inst.seed;
  j["h"] = inst.h;
  j["b"] = inst.b;
  j["b_requested"] = inst.b_requested;
  j["k"] = inst.k;
  j["global_check_budget"] = inst.global_check_budget;
  j["global_constraints"] = json::array();
  for (const auto& g : inst.global_constraints) j["global_constraints"].push_back(to_text(g));
  j["prefilled"] = json::array();
  for (const auto& p : inst.prefilled) j["prefilled"].push_back(cell_json(p.cell, p.item_id));
  j["hidden_slots"] = json::array();
  for (const auto& slot : inst.hidden) {
    json s{{"row", slot.cell.row}, {"col", slot.cell.col}, {"query_budget", slot.query_budget}};
    s["constraints"] = json::array();
    for (const auto& c : slot.constraints) s["constraints"].push_back(to_text(c));
    s["candidates"] = slot.candidates;
    j["hidden_slots"].push_back(std::move(s));
  }
  j["items"] = items_json(inst.items);
  return dump(j);
}

std::string dump_document(const AnswerKey& key) {
  json j;
  j["truth"] = json::array();
  for (const auto& [cell, id] : key.truth) j["truth"].push_back(cell_json(cell, id));
  j["decoys"] = json::object();
  for (const auto& [cell, ids] : key.decoys) j["decoys"][to_string(cell)] = ids;
  j["filters"] = json::object();
  for (const auto& [cell, ids] : key.filters) j["filters"][to_string(cell)] = ids;
  j["allocations"] = json::array();
  for (const auto& a : key.allocations) {
    j["allocations"].push_back(json{{"row", a.cell.row}, {"col", a.cell.col}, {"count", a.count}});
  }
  return dump(j);
}

Instance parse_instance(std::string_view text) {
  const json j = parse_json(text);
  const std::string root = "$";
  Instance inst;
  inst.domain = get_field<std::string>(j, "domain", root);
  inst.rows = get_field<int>(j, "rows", root);
  inst.cols = get_field<int>(j, "cols", root);
  inst.seed = get_field<std::uint64_t>(j, "seed", root);
  inst.h = get_field<int>(j, "h", root);
  inst.b = get_field<int>(j, "b", root);
  inst.b_requested = j.contains("b_requested") ? get_field<int>(j, "b_requested", root) : inst.b;
  inst.k = get_field<int>(j, "k", root);
  inst.global_check_budget = get_field<int>(j, "global_check_budget", root);

  const auto& globals = array_field(j, "global_constraints", root);
  for (std::size_t i = 0; i < globals.size(); ++i) {
    inst.global_constraints.push_back(parse_text(globals[i], "$.global_constraints[" + std::to_string(i) + "]",
                                                 [](const std::string& t) { return parse_global_constraint(t); }));
  }
  const auto& prefilled = array_field(j, "prefilled", root);
  for (std::size_t i = 0; i < prefilled.size(); ++i) {
    const auto path = "$.prefilled[" + std::to_string(i) + "]";
    inst.prefilled.push_back({read_cell(prefilled[i], path), get_field<std::string>(prefilled[i], "item_id", path)});
  }
  const auto& hidden = array_field(j, "hidden_slots", root);
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const auto path = "$.hidden_slots[" + std::to_string(i) + "]";
    HiddenSlot slot;
    slot.cell = read_cell(hidden[i], path);
    slot.query_budget = get_field<int>(hidden[i], "query_budget", path);
    const auto& cs = array_field(hidden[i], "constraints", path);
    for (std::size_t c = 0; c < cs.size(); ++c) {
      slot.constraints.push_back(parse_text(cs[c], path + ".constraints[" + std::to_string(c) + "]",
                                            [](const std::string& t) { return parse_slot_constraint(t); }));
    }
    slot.candidates = get_as<std::vector<std::string>>(array_field(hidden[i], "candidates", path), path + ".candidates");
    inst.hidden.push_back(std::move(slot));
  }
  const auto& items = field(j, "items", root);
  if (!items.is_object()) throw SchemaError("$.items", "$.items: expected an object");
  for (const auto& [id, value] : items.items()) inst.items.emplace(id, read_item(id, value, "$.items." + id));
  return inst;
}

AnswerKey parse_answer_key(std::string_view text) {
  const json j = parse_json(text);
  const std::string root = "$";
  AnswerKey key;
  const auto& truth = array_field(j, "truth", root);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto path = "$.truth[" + std::to_string(i) + "]";
    key.truth.emplace(read_cell(truth[i], path), get_field<std::string>(truth[i], "item_id", path));
  }
  for (const char* name : {"decoys", "filters"}) {
    const auto& m = field(j, name, root);
    if (!m.is_object()) throw SchemaError(std::string("$.") + name, std::string("$.") + name + ": expected an object");
    auto& target = std::string(name) == "decoys" ? key.decoys : key.filters;
    for (const auto& [cell_text, ids] : m.items()) {
      const auto path = std::string("$.") + name + "." + cell_text;
      Cell cell;
      try {
        cell = parse_cell(cell_text);
      } catch (const ParseError&) {
        throw SchemaError(path, path + ": slot key must be 'row,col'");
      }
      target[cell] = get_as<std::vector<std::string>>(ids, path);
    }
  }
  const auto& allocations = array_field(j, "allocations", root);
  for (std::size_t i = 0; i < allocations.size(); ++i) {
    const auto path = "$.allocations[" + std::to_string(i) + "]";
    key.allocations.push_back({read_cell(allocations[i], path), get_field<int>(allocations[i], "count", path)});
  }
  return key;
}

void write_instance(const Instance& instance, const AnswerKey& key, const std::filesystem::path& path) {
  write_text_file(path, dump_document(instance));
  write_text_file(key_path_for(path), dump_document(key));
}

Instance read_public_instance(const std::filesystem::path& path) {
  try {
    return parse_instance(read_text_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(e.field(), path.string() + ": " + e.what());
  }
}

AnswerKey read_answer_key(const std::filesystem::path& path) {
  try {
    return parse_answer_key(read_text_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(e.field(), path.string() + ": " + e.what());
  }
}

std::pair<Instance, AnswerKey> read_instance(const std::filesystem::path& path) {
  return {read_public_instance(path), read_answer_key(key_path_for(path))};
}

void write_pool(const std::vector<Item>& pool, const std::filesystem::path& path) {
  json j = json::array();
  for (const auto& item : pool) {
    auto entry = item_json(item);
    entry["id"] = item.id;
    j.push_back(std::move(entry));
  }
  write_text_file(path, dump(j));
}

std::vector<Item> read_pool(const std::filesystem::path& path) {
  const json j = parse_json(read_text_file(path));
  if (!j.is_array()) throw SchemaError("$", "pool file must be an array");
  std::vector<Item> pool;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto path_i = "$[" + std::to_string(i) + "]";
    pool.push_back(read_item(get_field<std::string>(j[i], "id", path_i), j[i], path_i));
  }
  return pool;
}

}  // namespace gridbench
