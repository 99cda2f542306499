#include "gridbench/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "gridbench/errors.hpp"

namespace gridbench {

const AttrValue& Item::attribute(std::string_view field) const {
  auto it = attributes.find(std::string(field));
  if (it == attributes.end()) {
    throw SchemaError(std::string(field), "item " + id + " has no attribute '" + std::string(field) + "'");
  }
  return it->second;
}

const Item& lookup_item(const ItemTable& items, std::string_view id) {
  auto it = items.find(id);
  if (it == items.end()) throw LookupError("unknown item id '" + std::string(id) + "'");
  return it->second;
}

std::string to_string(const Cell& cell) {
  return std::to_string(cell.row) + "," + std::to_string(cell.col);
}

Cell parse_cell(std::string_view text) {
  auto comma = text.find(',');
  Cell cell;
  if (comma == std::string_view::npos) throw ParseError(0, "expected 'row,col'");
  auto r = std::from_chars(text.data(), text.data() + comma, cell.row);
  auto c = std::from_chars(text.data() + comma + 1, text.data() + text.size(), cell.col);
  if (r.ec != std::errc{} || r.ptr != text.data() + comma || c.ec != std::errc{} ||
      c.ptr != text.data() + text.size()) {
    throw ParseError(0, "expected 'row,col'");
  }
  return cell;
}

GridAssignment::GridAssignment(int rows, int cols)
    : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
  if (rows <= 0 || cols <= 0) throw PreconditionError("grid dimensions must be positive");
}

bool GridAssignment::contains(Cell cell) const noexcept {
  return cell.row >= 0 && cell.row < rows_ && cell.col >= 0 && cell.col < cols_;
}

std::size_t GridAssignment::index(Cell cell) const {
  if (!contains(cell)) throw PreconditionError("cell " + to_string(cell) + " is outside the grid");
  return static_cast<std::size_t>(cell.row) * static_cast<std::size_t>(cols_) +
         static_cast<std::size_t>(cell.col);
}

const std::optional<std::string>& GridAssignment::at(Cell cell) const { return cells_[index(cell)]; }

void GridAssignment::set(Cell cell, std::optional<std::string> id) { cells_[index(cell)] = std::move(id); }

bool GridAssignment::is_full() const noexcept {
  return std::all_of(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); });
}

namespace {

[[noreturn]] void type_mismatch(const std::string& field, const std::string& detail) {
  throw SchemaError(field, "attribute '" + field + "': " + detail);
}

std::int64_t numeric_attribute(const Item& item, const std::string& field) {
  const auto& value = item.attribute(field);
  if (const auto* n = std::get_if<std::int64_t>(&value)) return *n;
  type_mismatch(field, "expected a numeric attribute");
}

const std::string& categorical_attribute(const Item& item, const std::string& field) {
  const auto& value = item.attribute(field);
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  type_mismatch(field, "expected a categorical attribute");
}

}  // namespace

bool eval_slot(const Item& item, const SlotConstraint& c) {
  switch (c.op) {
    case Comparator::LE:
    case Comparator::GE: {
      const auto* bound = std::get_if<std::int64_t>(&c.value);
      if (bound == nullptr) type_mismatch(c.field, "ordering comparison needs a numeric value");
      const auto v = numeric_attribute(item, c.field);
      return c.op == Comparator::LE ? v <= *bound : v >= *bound;
    }
    case Comparator::EQ:
    case Comparator::NE: {
      bool equal = false;
      if (const auto* n = std::get_if<std::int64_t>(&c.value)) {
        equal = numeric_attribute(item, c.field) == *n;
      } else if (const auto* s = std::get_if<std::string>(&c.value)) {
        equal = categorical_attribute(item, c.field) == *s;
      } else {
        type_mismatch(c.field, "equality needs a single value");
      }
      return c.op == Comparator::EQ ? equal : !equal;
    }
    case Comparator::IN: {
      const auto* set = std::get_if<std::vector<std::string>>(&c.value);
      if (set == nullptr) type_mismatch(c.field, "'in' needs a set of categories");
      const auto& v = categorical_attribute(item, c.field);
      return std::find(set->begin(), set->end(), v) != set->end();
    }
  }
  return false;
}

bool eval_slot(const Item& item, std::span<const SlotConstraint> constraints) {
  // Evaluate every constraint so schema errors surface even after a failure.
  bool ok = true;
  for (const auto& c : constraints) ok = eval_slot(item, c) && ok;
  return ok;
}

std::int64_t contribution(const Item& item, const GlobalConstraint& c) {
  if (c.kind == GlobalKind::CategoryCountUpper) {
    return categorical_attribute(item, c.field) == c.category ? 1 : 0;
  }
  return numeric_attribute(item, c.field);
}

bool holds(const GlobalConstraint& c, std::int64_t aggregate) noexcept {
  return c.kind == GlobalKind::SumLower ? aggregate >= c.bound : aggregate <= c.bound;
}

namespace {

bool eval_global(const GridAssignment& grid, const ItemTable& items,
                 std::span<const GlobalConstraint> constraints) {
  const bool full = grid.is_full();
  std::vector<const Item*> filled;
  for (const auto& cell : grid.cells()) {
    if (cell) filled.push_back(&lookup_item(items, *cell));
  }
  bool ok = true;
  for (const auto& c : constraints) {
    if (!full && !c.is_upper_bound()) continue;
    std::int64_t aggregate = 0;
    for (const Item* item : filled) aggregate += contribution(*item, c);
    ok = ok && holds(c, aggregate);
  }
  return ok;
}

}  // namespace

bool eval_global_full(const GridAssignment& grid, const ItemTable& items,
                      std::span<const GlobalConstraint> constraints) {
  if (!grid.is_full()) throw PreconditionError("global check on a grid with unfilled cells");
  return eval_global(grid, items, constraints);
}

bool eval_global_open_prefix(const GridAssignment& grid, const ItemTable& items,
                             std::span<const GlobalConstraint> constraints) {
  return eval_global(grid, items, constraints);
}

// ---------------------------------------------------------------------------
// Text form

std::string to_string(Comparator op) {
  switch (op) {
    case Comparator::LE: return "<=";
    case Comparator::GE: return ">=";
    case Comparator::EQ: return "==";
    case Comparator::NE: return "!=";
    case Comparator::IN: return "in";
  }
  return "?";
}

namespace {

std::string value_text(const ConstraintValue& value) {
  if (const auto* n = std::get_if<std::int64_t>(&value)) return std::to_string(*n);
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  const auto& set = std::get<std::vector<std::string>>(value);
  std::string out = "[";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i != 0) out += ", ";
    out += set[i];
  }
  return out + "]";
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  std::size_t position() const { return pos_; }

  std::string_view word() {
    skip_space();
    const auto start = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a word");
    return text_.substr(start, pos_ - start);
  }

  bool peek_word(std::string_view w) {
    skip_space();
    if (text_.substr(pos_, w.size()) != w) return false;
    const auto end = pos_ + w.size();
    return end >= text_.size() || !is_word_char(text_[end]);
  }

  void expect_word(std::string_view w) {
    if (!peek_word(w)) fail("expected '" + std::string(w) + "'");
    pos_ += w.size();
  }

  bool try_symbol(std::string_view s) {
    skip_space();
    if (text_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }

  std::int64_t integer() {
    skip_space();
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc{} || (ptr < text_.data() + text_.size() && is_word_char(*ptr))) {
      fail("expected an integer");
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  void finish() {
    if (!at_end()) fail("unexpected trailing text");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

bool looks_numeric(std::string_view w) {
  if (w.empty()) return false;
  std::size_t i = (w[0] == '-') ? 1 : 0;
  if (i == w.size()) return false;
  return std::all_of(w.begin() + static_cast<std::ptrdiff_t>(i), w.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

ConstraintValue scalar_value(Lexer& lex) {
  const auto pos = lex.position();
  const auto w = lex.word();
  if (looks_numeric(w)) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
    if (ec != std::errc{}) throw ParseError(pos, "integer out of range");
    return value;
  }
  return std::string(w);
}

GlobalConstraint parse_global(Lexer& lex) {
  GlobalConstraint c;
  if (lex.peek_word("total")) {
    lex.expect_word("total");
    c.field = std::string(lex.word());
    if (lex.try_symbol("<=")) {
      c.kind = GlobalKind::SumUpper;
    } else if (lex.try_symbol(">=")) {
      c.kind = GlobalKind::SumLower;
    } else {
      lex.fail("expected '<=' or '>='");
    }
    c.bound = lex.integer();
  } else {
    lex.expect_word("at");
    lex.expect_word("most");
    c.kind = GlobalKind::CategoryCountUpper;
    c.bound = lex.integer();
    lex.expect_word("items");
    lex.expect_word("with");
    c.field = std::string(lex.word());
    if (!lex.try_symbol("=")) lex.fail("expected '='");
    c.category = std::string(lex.word());
  }
  lex.finish();
  return c;
}

SlotConstraint parse_slot(Lexer& lex) {
  SlotConstraint c;
  c.field = std::string(lex.word());
  if (lex.try_symbol("<=")) {
    c.op = Comparator::LE;
  } else if (lex.try_symbol(">=")) {
    c.op = Comparator::GE;
  } else if (lex.try_symbol("==")) {
    c.op = Comparator::EQ;
  } else if (lex.try_symbol("!=")) {
    c.op = Comparator::NE;
  } else if (lex.peek_word("in")) {
    lex.expect_word("in");
    c.op = Comparator::IN;
  } else {
    lex.fail("expected a comparator");
  }

  if (c.op == Comparator::LE || c.op == Comparator::GE) {
    c.value = lex.integer();
  } else if (c.op == Comparator::IN) {
    if (!lex.try_symbol("[")) lex.fail("expected '['");
    std::vector<std::string> set;
    if (!lex.try_symbol("]")) {
      do {
        set.emplace_back(lex.word());
      } while (lex.try_symbol(","));
      if (!lex.try_symbol("]")) lex.fail("expected ']'");
    }
    c.value = std::move(set);
  } else {
    c.value = scalar_value(lex);
  }
  lex.finish();
  return c;
}

bool is_global_text(std::string_view text) {
  Lexer probe(text);
  return probe.peek_word("total") || probe.peek_word("at");
}

}  // namespace

std::string to_text(const SlotConstraint& c) {
  return c.field + " " + to_string(c.op) + " " + value_text(c.value);
}

std::string to_text(const GlobalConstraint& c) {
  switch (c.kind) {
    case GlobalKind::SumUpper: return "total " + c.field + " <= " + std::to_string(c.bound);
    case GlobalKind::SumLower: return "total " + c.field + " >= " + std::to_string(c.bound);
    case GlobalKind::CategoryCountUpper:
      return "at most " + std::to_string(c.bound) + " items with " + c.field + " = " + c.category;
  }
  return {};
}

SlotConstraint parse_slot_constraint(std::string_view text) {
  Lexer lex(text);
  return parse_slot(lex);
}

GlobalConstraint parse_global_constraint(std::string_view text) {
  Lexer lex(text);
  return parse_global(lex);
}

Constraint parse_constraint(std::string_view text) {
  if (is_global_text(text)) return parse_global_constraint(text);
  return parse_slot_constraint(text);
}

}  // namespace gridbench
