#include "gridbench/domains.hpp"

#include <algorithm>
#include <set>

#include "gridbench/errors.hpp"

namespace gridbench {

namespace {

std::vector<DomainSchema> build_schemas() {
  std::vector<DomainSchema> out;

  out.push_back({"course", 'C',
                 "Fill a weekly course timetable (rows are days, columns are time slots) with courses.",
                 {{"credits", 1, 6}, {"price", 50, 500}, {"difficulty", 1, 5}, {"workload", 1, 20}},
                 {{"category",
                   {"Analysis", "Algebra", "Physics", "Chemistry", "Biology", "History", "Literature",
                    "Economics"}},
                  {"teacher", {"Smith", "Johnson", "Lee", "Garcia", "Chen", "Patel", "Kim", "Brown"}}},
                 "price",
                 "workload",
                 "credits"});

  out.push_back({"shopping", 'S',
                 "Fill a shopping plan (rows are trips, columns are list positions) with catalog products.",
                 {{"price", 2, 400}, {"weight", 1, 50}, {"rating", 1, 10}, {"freshness", 1, 5}},
                 {{"category",
                   {"Produce", "Dairy", "Bakery", "Meat", "Seafood", "Frozen", "Pantry", "Beverages"}},
                  {"brand", {"Acme", "Globex", "Initech", "Umbrella", "Hooli", "Stark", "Wayne", "Wonka"}}},
                 "price",
                 "weight",
                 "rating"});

  out.push_back({"travel", 'T',
                 "Fill a travel itinerary (rows are days, columns are time blocks) with activities.",
                 {{"cost", 40, 900}, {"duration", 1, 12}, {"enjoyment", 1, 10}, {"intensity", 1, 5}},
                 {{"kind", {"Museum", "Hike", "Tour", "Beach", "Concert", "Market", "Cruise", "Festival"}},
                  {"city", {"Paris", "Rome", "Tokyo", "Lima", "Cairo", "Oslo", "Sydney", "Boston"}}},
                 "cost",
                 "duration",
                 "enjoyment"});

  out.push_back({"workforce", 'W',
                 "Fill a staff roster (rows are days, columns are shifts) with employees.",
                 {{"wage", 15, 120}, {"hours", 2, 12}, {"productivity", 1, 10}, {"seniority", 1, 5}},
                 {{"role",
                   {"Analyst", "Manager", "Technician", "Engineer", "Clerk", "Designer", "Planner", "Auditor"}},
                  {"department",
                   {"Sales", "Support", "Engineering", "Finance", "Legal", "Operations", "Marketing",
                    "Research"}}},
                 "wage",
                 "hours",
                 "productivity"});

  out.push_back({"meal", 'M',
                 "Fill a weekly meal plan (rows are days, columns are meals) with dishes.",
                 {{"cost", 3, 60}, {"calories", 150, 1200}, {"protein", 5, 60}, {"spiciness", 1, 5}},
                 {{"cuisine",
                   {"Italian", "Mexican", "Indian", "Thai", "Japanese", "Greek", "French", "Korean"}},
                  {"diet", {"Vegan", "Vegetarian", "Pescatarian", "Omnivore", "Keto", "Paleo"}}},
                 "cost",
                 "calories",
                 "protein"});

  out.push_back({"pc_build", 'P',
                 "Fill a hardware build sheet (rows are machines, columns are part bays) with components.",
                 {{"price", 20, 1500}, {"power", 5, 350}, {"performance", 1, 100}, {"tier", 1, 5}},
                 {{"component", {"CPU", "GPU", "Motherboard", "Memory", "Storage", "PSU", "Case", "Cooler"}},
                  {"brand", {"Asus", "Msi", "Gigabyte", "Corsair", "Intel", "Amd", "Nvidia", "Kingston"}}},
                 "price",
                 "power",
                 "performance"});
  return out;
}

const std::vector<DomainSchema>& schemas() {
  static const std::vector<DomainSchema> all = build_schemas();
  return all;
}

}  // namespace

const NumericField* DomainSchema::numeric(std::string_view field) const {
  for (const auto& f : numeric_fields) {
    if (f.name == field) return &f;
  }
  return nullptr;
}

const CategoricalField* DomainSchema::categorical(std::string_view field) const {
  for (const auto& f : categorical_fields) {
    if (f.name == field) return &f;
  }
  return nullptr;
}

std::vector<std::string> DomainSchema::field_names() const {
  std::vector<std::string> names;
  for (const auto& f : numeric_fields) names.push_back(f.name);
  for (const auto& f : categorical_fields) names.push_back(f.name);
  return names;
}

const std::vector<std::string>& list_domains() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : schemas()) out.push_back(s.domain);
    return out;
  }();
  return names;
}

const DomainSchema& schema(std::string_view domain) {
  for (const auto& s : schemas()) {
    if (s.domain == domain) return s;
  }
  throw ConfigError("unknown domain '" + std::string(domain) + "'");
}

void validate_item(const Item& item, const DomainSchema& s) {
  if (item.attributes.size() != s.numeric_fields.size() + s.categorical_fields.size()) {
    for (const auto& [name, value] : item.attributes) {
      if (!s.has_field(name)) throw SchemaError(name, "item " + item.id + " has extra attribute '" + name + "'");
    }
  }
  for (const auto& f : s.numeric_fields) {
    const auto* v = std::get_if<std::int64_t>(&item.attribute(f.name));
    if (v == nullptr) throw SchemaError(f.name, "item " + item.id + ": '" + f.name + "' must be numeric");
    if (*v < f.min || *v > f.max) {
      throw SchemaError(f.name, "item " + item.id + ": '" + f.name + "' out of range");
    }
  }
  for (const auto& f : s.categorical_fields) {
    const auto* v = std::get_if<std::string>(&item.attribute(f.name));
    if (v == nullptr) throw SchemaError(f.name, "item " + item.id + ": '" + f.name + "' must be categorical");
    if (std::find(f.categories.begin(), f.categories.end(), *v) == f.categories.end()) {
      throw SchemaError(f.name, "item " + item.id + ": unknown " + f.name + " '" + *v + "'");
    }
  }
}

void check_constraint(const SlotConstraint& c, const DomainSchema& s) {
  const bool numeric = s.numeric(c.field) != nullptr;
  if (!numeric && s.categorical(c.field) == nullptr) {
    throw SchemaError(c.field, "unknown attribute '" + c.field + "' in domain " + s.domain);
  }
  const bool int_value = std::holds_alternative<std::int64_t>(c.value);
  const bool set_value = std::holds_alternative<std::vector<std::string>>(c.value);
  switch (c.op) {
    case Comparator::LE:
    case Comparator::GE:
      if (!numeric || !int_value) throw SchemaError(c.field, "'" + c.field + "': ordering needs numeric field and value");
      break;
    case Comparator::EQ:
    case Comparator::NE:
      if (set_value || numeric != int_value) throw SchemaError(c.field, "'" + c.field + "': value type mismatch");
      break;
    case Comparator::IN:
      if (numeric || !set_value) throw SchemaError(c.field, "'" + c.field + "': 'in' needs a categorical field and a set");
      break;
  }
}

void check_constraint(const GlobalConstraint& c, const DomainSchema& s) {
  if (c.kind == GlobalKind::CategoryCountUpper) {
    if (s.categorical(c.field) == nullptr) throw SchemaError(c.field, "'" + c.field + "' is not categorical");
    if (c.bound < 0) throw SchemaError(c.field, "category count bound must be non-negative");
  } else if (s.numeric(c.field) == nullptr) {
    throw SchemaError(c.field, "'" + c.field + "' is not numeric");
  }
}

std::vector<Item> sample_pool(std::string_view domain, std::size_t size, Rng& rng, std::size_t min_size) {
  const auto& s = schema(domain);
  if (size < min_size) {
    throw ConfigError("pool size " + std::to_string(size) + " is below the required " + std::to_string(min_size));
  }
  std::vector<Item> pool;
  pool.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    Item item;
    item.id = std::string(1, s.id_prefix) + std::to_string(i + 1);
    for (const auto& f : s.numeric_fields) item.attributes[f.name] = rng.between(f.min, f.max);
    for (const auto& f : s.categorical_fields) item.attributes[f.name] = rng.pick(f.categories);
    item.name = std::get<std::string>(item.attributes.at(s.categorical_fields.front().name)) + " " +
                std::to_string(rng.between(100, 999));
    pool.push_back(std::move(item));
  }
  return pool;
}

}  // namespace gridbench
