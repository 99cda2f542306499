#include "gridbench/prompt.hpp"

#include <sstream>

#include "gridbench/domains.hpp"
#include "gridbench/environment.hpp"
#include "gridbench/sha256.hpp"

namespace gridbench {

namespace {

std::string domain_header(std::string_view domain) {
  const auto& s = schema(domain);
  const auto tools = tool_names(domain);
  std::ostringstream out;
  out << "You are filling a " << s.domain << " planning grid. " << s.summary << "\n\n"
      << "Some cells are hidden. Each hidden cell must receive exactly one item from its own candidate list. "
      << "Every hidden cell has local constraints on its item, and the whole grid must satisfy the global "
      << "constraints below. Exactly one assignment satisfies everything.\n\n"
      << "Item attributes:\n";
  for (const auto& f : s.numeric_fields) {
    out << "- " << f.name << ": integer in [" << f.min << ", " << f.max << "]\n";
  }
  for (const auto& f : s.categorical_fields) {
    out << "- " << f.name << ": one of";
    for (std::size_t i = 0; i < f.categories.size(); ++i) out << (i == 0 ? " " : ", ") << f.categories[i];
    out << "\n";
  }
  out << "\nRules:\n"
      << "- Rows and columns are zero-based.\n"
      << "- " << tools[7] << " works only for items in pre-filled cells.\n"
      << "- " << tools[6] << " and " << tools[8]
      << " use the query budget of the hidden cells whose candidates they touch.\n"
      << "- " << tools[10] << " uses the global check budget. On a partly filled grid it only checks upper limits.\n"
      << "- Tool calls can fail transiently; repeat a call that failed.\n"
      << "- Call " << tools[5] << " when every hidden cell is filled.\n";
  return out.str();
}

}  // namespace

std::string system_prompt(const Instance& instance) {
  std::ostringstream out;
  out << domain_header(instance.domain) << "\nGrid: " << instance.rows << " rows x " << instance.cols
      << " columns.\n\nHidden cells and their local constraints:\n";
  for (const auto& slot : instance.hidden) {
    out << "- (" << slot.cell.row << ", " << slot.cell.col << "):";
    for (std::size_t i = 0; i < slot.constraints.size(); ++i) {
      out << (i == 0 ? " " : "; ") << to_text(slot.constraints[i]);
    }
    out << " [query budget " << slot.query_budget << "]\n  candidates:";
    for (const auto& id : slot.candidates) out << ' ' << id;
    out << "\n";
  }
  out << "\nGlobal constraints over all " << instance.rows * instance.cols << " cells:\n";
  for (const auto& g : instance.global_constraints) out << "- " << to_text(g) << "\n";
  out << "\nGlobal check budget: " << instance.global_check_budget << "\n";
  return out.str();
}

std::string prompt_hash(std::string_view domain) {
  std::string text(kPromptVersion);
  text += '\n';
  text += domain_header(domain);
  return sha256_hex(text);
}

}  // namespace gridbench
