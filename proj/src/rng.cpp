#include "ampda/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ampda/errors.hpp"

namespace ampda {

std::uint64_t Rng::derive(std::uint64_t master_seed, std::uint64_t index) {
  // splitmix64 finalizer over the master seed advanced by the index.
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Shift u1 into (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_below: n must be positive");
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v >= threshold) return v % n;
  }
}

std::vector<std::size_t> Rng::pick_indices(std::size_t k, std::size_t n) {
  if (k > n) throw ArgumentError("pick_indices: k exceeds n");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t j = t + static_cast<std::size_t>(uniform_below(n - t));
    std::swap(pool[t], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace ampda
