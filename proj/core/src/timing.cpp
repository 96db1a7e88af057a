#include "forumpaths/timing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "forumpaths/error.hpp"

namespace forumpaths {

InterEventTimes inter_event_times(const TimingVector& timing) {
  const auto& t = timing.event_times;
  if (t.size() < 2)
    throw std::invalid_argument("inter-event times need at least two events");
  InterEventTimes out;
  out.deltas.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const auto gap = t[i] - t[i - 1];
    if (gap <= 0)
      ++out.zeros_dropped;
    else
      out.deltas.push_back(static_cast<double>(gap));
  }
  return out;
}

std::vector<double> normalize_and_pool(const ForumArchive& archive, std::size_t min_events) {
  std::vector<double> pooled;
  for (const auto& [user, history] : archive.users) {
    const auto& times = history.timing.event_times;
    if (times.size() < std::max<std::size_t>(min_events, 2)) continue;
    auto gaps = inter_event_times(history.timing);
    if (gaps.deltas.empty()) continue;
    double sum = 0.0;
    for (double d : gaps.deltas) sum += d;
    const double mean = sum / static_cast<double>(gaps.deltas.size());
    for (double d : gaps.deltas) pooled.push_back(d / mean);
  }
  return pooled;
}

PowerLawFit fit_power_law(std::span<const double> samples, int bins_per_decade) {
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  if (samples.size() < 50)
    throw DataError(fmt::format("power-law fit needs >= 50 samples, got {}", samples.size()));
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(lo > 0.0) || !std::isfinite(hi))
    throw DataError("power-law fit needs finite, strictly positive samples");
  if (hi / lo < 10.0)
    throw DataError("power-law fit needs samples spanning at least one decade");

  const double bpd = bins_per_decade;
  std::map<long long, std::size_t> counts;
  for (double x : samples) ++counts[static_cast<long long>(std::floor(std::log10(x) * bpd))];

  const double n = static_cast<double>(samples.size());
  std::vector<double> lx, ly;
  for (const auto& [k, count] : counts) {
    const double left = std::pow(10.0, static_cast<double>(k) / bpd);
    const double right = std::pow(10.0, static_cast<double>(k + 1) / bpd);
    const double center = std::pow(10.0, (static_cast<double>(k) + 0.5) / bpd);
    lx.push_back(std::log10(center));
    ly.push_back(std::log10(static_cast<double>(count) / (n * (right - left))));
  }
  if (lx.size() < 3) throw DataError("power-law fit needs at least 3 nonempty bins");

  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + fit.exponent * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  fit.bins = lx.size();
  fit.fit_min = std::pow(10.0, static_cast<double>(counts.begin()->first) / bpd);
  fit.fit_max = std::pow(10.0, static_cast<double>(counts.rbegin()->first + 1) / bpd);
  return fit;
}

}  // namespace forumpaths
