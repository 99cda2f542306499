#pragma once

#include <filesystem>
#include <string>

#include "gridbench/generator.hpp"
#include "gridbench/instance.hpp"

namespace fixtures {

inline gridbench::Item course_item(const std::string& id, std::int64_t credits, std::int64_t price,
                                   std::int64_t difficulty, std::int64_t workload = 5,
                                   const std::string& category = "Analysis", const std::string& teacher = "Lee") {
  gridbench::Item item;
  item.id = id;
  item.name = category + " 191";
  item.attributes = {{"credits", credits},   {"price", price},       {"difficulty", difficulty},
                     {"workload", workload}, {"category", category}, {"teacher", teacher}};
  return item;
}

/// Small instance used across tests.
inline gridbench::GenConfig small_config(std::uint64_t seed, int h = 3, int b = 4, int k = 8) {
  gridbench::GenConfig c;
  c.seed = seed;
  c.hidden_count = h;
  c.decoy_budget = b;
  c.candidates_per_slot = k;
  return c;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("gridbench_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
