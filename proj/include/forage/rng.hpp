#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace forage {

// SplitMix64 step. Small, fast, and identical output on every platform,
// which the CSV determinism contract relies on.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic random stream. Every trial, environment and agent owns its
/// own instance; streams are never shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
    // 64-bit multiply-shift; bias is negligible for the small n used here.
    return static_cast<std::size_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  /// Sample an index from unnormalized nonnegative weights.
  std::size_t sample_weights(std::span<const double> w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (total <= 0.0) throw std::invalid_argument("sample_weights: zero total");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return w.size() - 1;
  }

 private:
  std::uint64_t state_;
};

/// Hash-combines a master seed with stream identifiers so that each
/// (algorithm, episode, iteration) trial gets an independent stream.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = master ^ 0x6a09e667f3bcc909ull;
  splitmix64_next(s);
  for (std::uint64_t p : parts) {
    s ^= p + 0x9e3779b97f4a7c15ull + (s << 6) + (s >> 2);
    splitmix64_next(s);
  }
  return splitmix64_next(s);
}

}  // namespace forage
