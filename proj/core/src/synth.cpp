#include "forumpaths/synth.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "forumpaths/models.hpp"

namespace forumpaths {
namespace {

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(':', pos);
    parts.push_back(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double to_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument(fmt::format("not a number: '{}'", s));
  return v;
}

std::int64_t to_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument(fmt::format("not an integer: '{}'", s));
  return v;
}

}  // namespace

UniformSpec UniformSpec::parse(std::string_view text) {
  const auto parts = split_colon(text);
  UniformSpec spec;
  if (parts.size() == 1) {
    spec.low = spec.high = to_double(parts[0]);
  } else if (parts.size() == 3 && parts[0] == "uniform") {
    spec.low = to_double(parts[1]);
    spec.high = to_double(parts[2]);
  } else {
    throw std::invalid_argument(fmt::format("bad distribution '{}'", text));
  }
  if (!(spec.low >= 0.0 && spec.high <= 1.0 && spec.low <= spec.high))
    throw std::invalid_argument(fmt::format("probability range '{}' outside [0, 1]", text));
  return spec;
}

double UniformSpec::draw(SeededRng& rng) const {
  if (fixed()) return low;
  return low + (high - low) * rng.uniform();
}

LengthSpec LengthSpec::parse(std::string_view text) {
  const auto parts = split_colon(text);
  LengthSpec spec;
  if (parts.size() == 1) {
    spec.kind = Kind::fixed;
    spec.a = spec.b = to_int(parts[0]);
  } else if (parts.size() == 3 && parts[0] == "uniform") {
    spec.kind = Kind::uniform;
    spec.a = to_int(parts[1]);
    spec.b = to_int(parts[2]);
  } else if (parts.size() == 2 && parts[0] == "geometric") {
    spec.kind = Kind::geometric;
    spec.mean = to_double(parts[1]);
    if (!(spec.mean >= 1.0)) throw std::invalid_argument("geometric mean length must be >= 1");
    return spec;
  } else {
    throw std::invalid_argument(fmt::format("bad length distribution '{}'", text));
  }
  if (spec.a < 1 || spec.b < spec.a)
    throw std::invalid_argument(fmt::format("bad length range '{}'", text));
  return spec;
}

std::int64_t LengthSpec::draw(SeededRng& rng) const {
  switch (kind) {
    case Kind::fixed:
      return a;
    case Kind::uniform:
      return a + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(b - a + 1)));
    case Kind::geometric: {
      if (mean == 1.0) return 1;
      const double p = 1.0 / mean;  // success probability, support {1, 2, ...}
      const double u = rng.uniform();
      return 1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
    }
  }
  return a;
}

double draw_truncated_power_law(double exponent, double lo, double hi, SeededRng& rng) {
  if (exponent == -1.0 || !(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("invalid truncated power-law parameters");
  const double k = exponent + 1.0;
  const double a = std::pow(lo, k), b = std::pow(hi, k);
  return std::pow(a + (b - a) * rng.uniform(), 1.0 / k);
}

ForumArchive generate_synthetic_archive(const SynthOptions& options) {
  if (options.users < 1) throw std::invalid_argument("synthetic forum needs at least one user");
  if (options.p_harsh && !(*options.p_harsh >= 0.0 && *options.p_harsh <= 1.0))
    throw std::invalid_argument("p_harsh outside [0, 1]");

  const auto width = fmt::format("{}", options.users).size();
  const SeededRng base(options.seed);
  ForumArchive archive{options.forum_id, {}};
  for (std::int64_t i = 0; i < options.users; ++i) {
    auto user = fmt::format("u{:0{}}", i + 1, width);
    auto rng = base.derive(user);
    const auto length = options.length.draw(rng);
    const double p_post = options.p_post.draw(rng);
    const auto symbols = options.p_harsh ? generate_sticking(length, p_post, *options.p_harsh, rng)
                                         : generate_coin_toss(length, p_post, rng);

    const auto spread = std::max<std::int64_t>(options.registration_spread_seconds, 1);
    const Timestamp t0 = options.start + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(spread)));
    std::vector<UserEvent> events;
    events.reserve(symbols.size());
    Timestamp t = t0;
    for (char c : symbols) {
      const double gap = draw_truncated_power_law(options.timing_exponent, options.min_gap_seconds,
                                                  options.max_gap_seconds, rng);
      t += static_cast<Timestamp>(std::ceil(gap));
      events.push_back({static_cast<EventKind>(c), t, {}});
    }
    archive.users.emplace(user, build_user_path(user, events, t0));
  }
  return archive;
}

}  // namespace forumpaths
