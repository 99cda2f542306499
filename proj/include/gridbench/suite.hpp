#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gridbench/generator.hpp"

namespace gridbench {

struct SuiteConfig {
  std::vector<std::string> domains = list_domains();
  std::vector<int> hs{1, 5, 7, 11, 15, 21};
  std::vector<int> bs{0, 2, 4, 8, 10, 15, 19, 21, 25};
  int k = 25;
  int rows = 5;
  int cols = 7;
  std::uint64_t seed = 42;
  std::size_t pool_size = kDefaultPoolSize;
  int query_budget = 40;
  int global_check_budget = 60;

  /// Throws ConfigError.
  void validate() const;
  /// Generator config of one suite cell. The instance seed depends on
  /// (seed, domain, h) only, so cells differing in b share a layout.
  GenConfig cell(const std::string& domain, int h, int b) const;
};

struct ManifestEntry {
  std::string path;  // relative to the suite directory
  std::string domain;
  int h = 0;
  int b = 0;
  std::string sha256;
  std::string key_sha256;
};

struct Manifest {
  SuiteConfig config;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// "<domain>/<domain>_h<h>_b<b>.json"
std::string instance_relpath(const std::string& domain, int h, int b);

/// Writes every instance with its key, the shared pools, and manifest.json.
/// Generation failures are listed in the manifest and do not stop the run.
Manifest generate_suite(const SuiteConfig& config, const std::filesystem::path& out_dir);

Manifest read_manifest(const std::filesystem::path& suite_dir);

/// Public task files under `dir`, sorted. Skips keys, pools and the manifest.
std::vector<std::filesystem::path> find_instances(const std::filesystem::path& dir);

struct DirValidation {
  std::size_t checked = 0;
  std::vector<std::string> failures;  // "path: detail"

  bool ok() const { return failures.empty() && checked > 0; }
};

DirValidation validate_dir(const std::filesystem::path& dir);

}  // namespace gridbench
