#include "gridbench/suite.hpp"

#include <algorithm>
#include <map>

#include "gridbench/errors.hpp"
#include "gridbench/sha256.hpp"
#include "gridbench/validate.hpp"
#include "json.hpp"

namespace gridbench {

namespace fs = std::filesystem;
using json = nlohmann::json;

void SuiteConfig::validate() const {
  if (domains.empty() || hs.empty() || bs.empty()) throw ConfigError("suite needs at least one domain, h and b");
  for (const auto& d : domains) schema(d);
  if (k < 2) throw ConfigError("k must be at least 2");
  for (int h : hs) {
    if (h < 1 || h > rows * cols) throw ConfigError("h=" + std::to_string(h) + " out of range");
  }
  for (int b : bs) {
    if (b < 0) throw ConfigError("b must be non-negative");
  }
}

GenConfig SuiteConfig::cell(const std::string& domain, int h, int b) const {
  GenConfig c;
  c.domain = domain;
  c.rows = rows;
  c.cols = cols;
  c.hidden_count = h;
  // A slot holds at most k-1 decoys.
  c.decoy_budget = std::min(b, h * (k - 1));
  c.requested_budget = b;
  c.candidates_per_slot = k;
  c.seed = Rng::derive_seed(seed, "instance:" + domain + ":h" + std::to_string(h));
  c.pool_size = pool_size;
  c.pool_seed = seed;
  c.query_budget = query_budget;
  c.global_check_budget = global_check_budget;
  return c;
}

std::string instance_relpath(const std::string& domain, int h, int b) {
  return domain + "/" + domain + "_h" + std::to_string(h) + "_b" + std::to_string(b) + ".json";
}

namespace {

json config_json(const SuiteConfig& c) {
  return json{{"domains", c.domains}, {"hs", c.hs},     {"bs", c.bs},
              {"k", c.k},             {"rows", c.rows}, {"cols", c.cols},
              {"seed", c.seed},       {"pool_size", c.pool_size}, {"query_budget", c.query_budget},
              {"global_check_budget", c.global_check_budget}};
}

}  // namespace

Manifest generate_suite(const SuiteConfig& config, const fs::path& out_dir) {
  config.validate();
  Manifest manifest;
  manifest.config = config;
  fs::create_directories(out_dir / "pools");

  for (const auto& domain : config.domains) {
    const auto pool = pool_for(config.cell(domain, config.hs.front(), 0));
    write_pool(pool, out_dir / "pools" / (domain + ".json"));
    for (int h : config.hs) {
      for (int b : config.bs) {
        const auto rel = instance_relpath(domain, h, b);
        try {
          const auto [instance, key] = generate(config.cell(domain, h, b), pool);
          const auto path = out_dir / rel;
          const auto text = dump_document(instance);
          const auto key_text = dump_document(key);
          write_text_file(path, text);
          write_text_file(key_path_for(path), key_text);
          manifest.entries.push_back({rel, domain, h, b, sha256_hex(text), sha256_hex(key_text)});
        } catch (const std::exception& e) {
          manifest.failures.push_back(rel + ": " + e.what());
        }
      }
    }
  }

  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back(json{{"path", e.path},
                           {"domain", e.domain},
                           {"h", e.h},
                           {"b", e.b},
                           {"sha256", e.sha256},
                           {"key_sha256", e.key_sha256}});
  }
  const json doc{{"config", config_json(config)}, {"instances", entries}, {"failures", manifest.failures}};
  write_text_file(out_dir / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

Manifest read_manifest(const fs::path& suite_dir) {
  const auto path = suite_dir / "manifest.json";
  const auto doc = json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ParseError(0, path.string() + " is not a JSON object");
  Manifest m;
  try {
    const auto& c = doc.at("config");
    m.config.domains = c.at("domains").get<std::vector<std::string>>();
    m.config.hs = c.at("hs").get<std::vector<int>>();
    m.config.bs = c.at("bs").get<std::vector<int>>();
    m.config.k = c.at("k").get<int>();
    m.config.rows = c.at("rows").get<int>();
    m.config.cols = c.at("cols").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.pool_size = c.at("pool_size").get<std::size_t>();
    m.config.query_budget = c.at("query_budget").get<int>();
    m.config.global_check_budget = c.at("global_check_budget").get<int>();
    for (const auto& e : doc.at("instances")) {
      m.entries.push_back({e.at("path").get<std::string>(), e.at("domain").get<std::string>(), e.at("h").get<int>(),
                           e.at("b").get<int>(), e.at("sha256").get<std::string>(),
                           e.at("key_sha256").get<std::string>()});
    }
    m.failures = doc.at("failures").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw SchemaError("manifest", path.string() + ": " + e.what());
  }
  return m;
}

std::vector<fs::path> find_instances(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    const auto name = p.filename().string();
    if (p.extension() != ".json" || name == "manifest.json" || name.ends_with(".key.json")) continue;
    if (p.parent_path().filename() == "pools") continue;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DirValidation validate_dir(const fs::path& dir) {
  DirValidation out;
  for (const auto& path : find_instances(dir)) {
    ++out.checked;
    const auto key_path = key_path_for(path);
    if (!fs::exists(key_path)) {
      out.failures.push_back(path.generic_string() + ": answer key " + key_path.generic_string() + " is missing");
      continue;
    }
    try {
      const auto [instance, key] = read_instance(path);
      const auto report = validate(instance, key);
      for (const auto& f : report.failures) out.failures.push_back(path.generic_string() + ": " + f);
    } catch (const std::exception& e) {
      out.failures.push_back(path.generic_string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gridbench
