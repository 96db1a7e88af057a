#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace forumpaths {

// Mixes a base seed with a string key (e.g. a user id) into a new seed.
// Used to give every user an independent, scheduling-order-free stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Seeded pseudo-random source with a portable draw sequence.
///
/// All derived quantities (uniform doubles, Bernoulli trials, bounded
/// integers) are computed from the raw engine output here rather than via
/// <random> distributions, whose algorithms differ between standard
/// libraries. Identical seed and algorithm therefore yield identical draws
/// on every platform.
class SeededRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/v1";

  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::string_view algorithm() const noexcept { return kAlgorithm; }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  SeededRng derive(std::string_view key) const { return SeededRng(derive_seed(seed_, key)); }
  SeededRng derive(std::uint64_t index) const { return SeededRng(derive_seed(seed_, index)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace forumpaths
