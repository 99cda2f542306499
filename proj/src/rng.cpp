#include "gridbench/rng.hpp"

#include <limits>

namespace gridbench {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::string_view tag) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32),
                                   static_cast<std::uint32_t>(tag.size())};
  for (char c : tag) words.push_back(static_cast<unsigned char>(c));
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded_engine(seed, {})) {}

Rng Rng::derive(std::uint64_t seed, std::string_view tag) {
  return Rng(derive_seed(seed, tag));
}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::string_view tag) {
  auto engine = seeded_engine(seed, tag);
  return engine();
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace gridbench
