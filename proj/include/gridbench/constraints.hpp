#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridbench {

/// Attribute values are integers or category strings; there are no floats.
using AttrValue = std::variant<std::int64_t, std::string>;

struct Item {
  std::string id;
  std::string name;
  std::map<std::string, AttrValue> attributes;

  /// Throws SchemaError when the item has no such attribute.
  const AttrValue& attribute(std::string_view field) const;

  friend bool operator==(const Item&, const Item&) = default;
};

/// Items keyed by id. Ordered so serialized documents are byte-stable.
using ItemTable = std::map<std::string, Item, std::less<>>;

const Item& lookup_item(const ItemTable& items, std::string_view id);

enum class Comparator { LE, GE, EQ, NE, IN };

using ConstraintValue = std::variant<std::int64_t, std::string, std::vector<std::string>>;

struct SlotConstraint {
  std::string field;
  Comparator op = Comparator::LE;
  ConstraintValue value;

  friend bool operator==(const SlotConstraint&, const SlotConstraint&) = default;
};

enum class GlobalKind { SumUpper, SumLower, CategoryCountUpper };

struct GlobalConstraint {
  GlobalKind kind = GlobalKind::SumUpper;
  std::string field;
  std::string category;  // CategoryCountUpper only
  std::int64_t bound = 0;

  /// SumUpper and CategoryCountUpper only ever get harder as cells fill.
  bool is_upper_bound() const noexcept { return kind != GlobalKind::SumLower; }

  friend bool operator==(const GlobalConstraint&, const GlobalConstraint&) = default;
};

struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

std::string to_string(const Cell& cell);  // "row,col"
Cell parse_cell(std::string_view text);

/// Grid of optional item ids, row-major. An empty optional is an unfilled
/// hidden slot.
class GridAssignment {
 public:
  GridAssignment() = default;
  GridAssignment(int rows, int cols);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool contains(Cell cell) const noexcept;

  const std::optional<std::string>& at(Cell cell) const;
  void set(Cell cell, std::optional<std::string> id);

  bool is_full() const noexcept;
  std::span<const std::optional<std::string>> cells() const noexcept { return cells_; }

  friend bool operator==(const GridAssignment&, const GridAssignment&) = default;

 private:
  std::size_t index(Cell cell) const;

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::optional<std::string>> cells_;
};

bool eval_slot(const Item& item, const SlotConstraint& constraint);
/// Conjunction; an empty list is satisfied by every item.
bool eval_slot(const Item& item, std::span<const SlotConstraint> constraints);

/// Amount an item adds to the constraint's aggregate: the field value for
/// sums, 0 or 1 for category counts.
std::int64_t contribution(const Item& item, const GlobalConstraint& constraint);
bool holds(const GlobalConstraint& constraint, std::int64_t aggregate) noexcept;

/// Requires a full assignment.
bool eval_global_full(const GridAssignment& grid, const ItemTable& items,
                      std::span<const GlobalConstraint> constraints);

/// Upper-bound constraints over the filled cells only. Lower bounds are
/// skipped while any cell is empty; on a full grid this is eval_global_full.
bool eval_global_open_prefix(const GridAssignment& grid, const ItemTable& items,
                             std::span<const GlobalConstraint> constraints);

std::string to_string(Comparator op);
std::string to_text(const SlotConstraint& constraint);
std::string to_text(const GlobalConstraint& constraint);

using Constraint = std::variant<SlotConstraint, GlobalConstraint>;

Constraint parse_constraint(std::string_view text);
SlotConstraint parse_slot_constraint(std::string_view text);
GlobalConstraint parse_global_constraint(std::string_view text);

}  // namespace gridbench
