#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridbench/constraints.hpp"
#include "gridbench/rng.hpp"

namespace gridbench {

struct NumericField {
  std::string name;
  std::int64_t min = 0;
  std::int64_t max = 0;
};

struct CategoricalField {
  std::string name;
  std::vector<std::string> categories;
};

/// Attribute layout of one domain. Every domain follows the same template:
/// a cost field and a load field (upper-bounded sums), a benefit field
/// (lower-bounded sum), a small ordinal, and two categoricals. The first
/// categorical also names items ("Analysis 191").
struct DomainSchema {
  std::string domain;
  char id_prefix = '?';
  std::string summary;
  std::vector<NumericField> numeric_fields;
  std::vector<CategoricalField> categorical_fields;
  std::string cost_field;
  std::string load_field;
  std::string benefit_field;

  const NumericField* numeric(std::string_view field) const;
  const CategoricalField* categorical(std::string_view field) const;
  bool has_field(std::string_view field) const { return numeric(field) || categorical(field); }
  /// Numeric fields first, then categoricals, in declaration order.
  std::vector<std::string> field_names() const;
};

/// The six supported domains, in a fixed order.
const std::vector<std::string>& list_domains();

/// Throws ConfigError for an unknown domain.
const DomainSchema& schema(std::string_view domain);

/// Throws SchemaError on a missing, extra, out-of-range or mistyped attribute.
void validate_item(const Item& item, const DomainSchema& schema);
void check_constraint(const SlotConstraint& constraint, const DomainSchema& schema);
void check_constraint(const GlobalConstraint& constraint, const DomainSchema& schema);

inline constexpr std::size_t kDefaultPoolSize = 1200;
/// Smallest pool that can fill a 5x7 grid plus one 25-candidate slot.
inline constexpr std::size_t kMinPoolSize = 35 + 25;

/// Uniform attributes over the schema ranges; ids are the domain prefix
/// followed by 1..size. Throws ConfigError when size < min_size.
std::vector<Item> sample_pool(std::string_view domain, std::size_t size, Rng& rng,
                              std::size_t min_size = kMinPoolSize);

}  // namespace gridbench
