#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "forumpaths/paths.hpp"
#include "forumpaths/rng.hpp"

namespace forumpaths {

/// A scalar parameter that is either fixed or drawn uniformly per user.
/// Text form: "0.75" or "uniform:0.5:0.9".
struct UniformSpec {
  double low = 0.0;
  double high = 0.0;

  static UniformSpec parse(std::string_view text);
  double draw(SeededRng& rng) const;
  bool fixed() const noexcept { return low == high; }
};

/// Path length distribution. Text form: "100", "uniform:20:200" or
/// "geometric:30" (shifted geometric on {1, 2, ...} with the given mean).
struct LengthSpec {
  enum class Kind { fixed, uniform, geometric } kind = Kind::fixed;
  std::int64_t a = 1;
  std::int64_t b = 1;
  double mean = 1.0;

  static LengthSpec parse(std::string_view text);
  std::int64_t draw(SeededRng& rng) const;
};

struct SynthOptions {
  std::string forum_id = "synthetic";
  std::int64_t users = 200;
  LengthSpec length{LengthSpec::Kind::fixed, 100, 100, 100.0};
  UniformSpec p_post{0.75, 0.75};
  std::optional<double> p_harsh;  // absent => coin-toss paths
  double timing_exponent = -1.7;  // density of gaps ~ x^exponent
  double min_gap_seconds = 60.0;
  double max_gap_seconds = 365.0 * 86400.0;
  Timestamp start = 1136073600;   // 2006-01-01T00:00:00Z
  std::int64_t registration_spread_seconds = 365 * 86400;
  std::uint64_t seed = 0;
};

/// Draws a gap from the power law x^exponent truncated to [lo, hi]
/// by inverse-CDF sampling. exponent must differ from -1.
double draw_truncated_power_law(double exponent, double lo, double hi, SeededRng& rng);

/// Synthetic forum archive. Every user draws from a stream derived from
/// (seed, user_id), so the output is a pure function of the options.
ForumArchive generate_synthetic_archive(const SynthOptions& options);

}  // namespace forumpaths
