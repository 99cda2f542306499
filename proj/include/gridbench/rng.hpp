#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace gridbench {

/// Seeded generator with portable draws.
///
/// The engine (mt19937_64) and std::seed_seq are fully specified by the
/// standard; the draw helpers below are written out by hand so that the same
/// seed yields the same values with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for (seed, tag). Used to give each generation stage
  /// its own stream so stages do not perturb each other.
  static Rng derive(std::uint64_t seed, std::string_view tag);
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Uniform in [0, 1) with 53 bits.
  double unit();
  bool chance(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& values) {
    shuffle(std::span<T>(values));
  }

  template <typename T>
  const T& pick(const std::vector<T>& values) {
    return values[below(values.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gridbench
