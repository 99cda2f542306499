#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gridbench/constraints.hpp"

namespace gridbench {

struct HiddenSlot {
  Cell cell;
  std::vector<SlotConstraint> constraints;
  std::vector<std::string> candidates;  // seeded shuffle; truth position varies
  int query_budget = 0;

  friend bool operator==(const HiddenSlot&, const HiddenSlot&) = default;
};

struct PrefilledCell {
  Cell cell;
  std::string item_id;

  friend bool operator==(const PrefilledCell&, const PrefilledCell&) = default;
};

/// Public part of a task: everything an agent may be told or may query.
struct Instance {
  std::string domain;
  int rows = 0;
  int cols = 0;
  std::uint64_t seed = 0;
  int h = 0;
  int b = 0;            // decoys actually placed
  int b_requested = 0;  // suite coordinate; differs from b only when b exceeded capacity
  int k = 0;
  int global_check_budget = 0;
  std::vector<PrefilledCell> prefilled;
  std::vector<HiddenSlot> hidden;
  std::vector<GlobalConstraint> global_constraints;
  ItemTable items;  // every item referenced by the instance

  const HiddenSlot* find_hidden(Cell cell) const;
  /// Pre-filled cells only; hidden slots empty.
  GridAssignment base_grid() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct DecoyAllocation {
  Cell cell;
  int count = 0;

  friend bool operator==(const DecoyAllocation&, const DecoyAllocation&) = default;
};

/// Private labels. Never served to agents.
struct AnswerKey {
  std::map<Cell, std::string> truth;
  std::map<Cell, std::vector<std::string>> decoys;
  std::map<Cell, std::vector<std::string>> filters;
  /// Decoy slots in the order they were generated.
  std::vector<DecoyAllocation> allocations;

  /// The full grid with every hidden slot at its truth item.
  GridAssignment truth_grid(const Instance& instance) const;

  friend bool operator==(const AnswerKey&, const AnswerKey&) = default;
};

/// "dir/x.json" -> "dir/x.key.json".
std::filesystem::path key_path_for(const std::filesystem::path& instance_path);

std::string dump_document(const Instance& instance);
std::string dump_document(const AnswerKey& key);
Instance parse_instance(std::string_view text);
AnswerKey parse_answer_key(std::string_view text);

/// Writes the public task file at `path` and the answer key next to it.
void write_instance(const Instance& instance, const AnswerKey& key, const std::filesystem::path& path);
std::pair<Instance, AnswerKey> read_instance(const std::filesystem::path& path);
Instance read_public_instance(const std::filesystem::path& path);
AnswerKey read_answer_key(const std::filesystem::path& path);

void write_pool(const std::vector<Item>& pool, const std::filesystem::path& path);
std::vector<Item> read_pool(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gridbench
