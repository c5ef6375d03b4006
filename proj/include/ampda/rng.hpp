#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ampda {

/// Seedable random stream with a fixed, documented draw contract so that a
/// seed fully determines every generated instance:
///   - raw draws come from mt19937_64 seeded directly with `seed`;
///   - uniform() maps one raw draw to its top 53 bits, value in [0, 1);
///   - normal() uses the Box-Muller transform: two uniforms (the first
///     shifted into (0, 1]) produce a pair, the second of which is cached
///     and returned by the next call before any new raw draw happens;
///   - uniform_below(n) uses unbiased modulo rejection on raw draws;
///   - pick_indices(k, n) is a partial Fisher-Yates shuffle: the t-th
///     selection swaps position t with t + uniform_below(n - t).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Mixes a master seed and a run index into an independent stream seed
  /// (one splitmix64 round), used to fan out batch runs.
  static std::uint64_t derive(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                              // [0, 1)
  double normal();                               // standard normal
  std::uint64_t uniform_below(std::uint64_t n);  // {0, ..., n-1}, n >= 1
  std::vector<std::size_t> pick_indices(std::size_t k, std::size_t n);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace ampda
