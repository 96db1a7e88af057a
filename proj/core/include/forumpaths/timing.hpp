#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "forumpaths/paths.hpp"

namespace forumpaths {

struct InterEventTimes {
  std::vector<double> deltas;  // strictly positive, in seconds
  std::size_t zeros_dropped = 0;
};

/// Gaps between consecutive events. The registration-to-first-event gap
/// is not included. Throws std::invalid_argument for fewer than 2 events.
InterEventTimes inter_event_times(const TimingVector& timing);

/// Pools the inter-event times of every user with at least `min_events`
/// events, each divided by that user's mean gap.
std::vector<double> normalize_and_pool(const ForumArchive& archive, std::size_t min_events = 10);

struct PowerLawFit {
  double exponent = 0.0;   // slope of log10(density) against log10(x)
  double fit_min = 0.0;    // lower edge of the first fitted bin
  double fit_max = 0.0;    // upper edge of the last fitted bin
  std::size_t bins = 0;    // nonempty bins used
  double residual = 0.0;   // RMS residual of the log-log fit
};

/// Log-binned density estimate followed by a least-squares line in
/// log-log space. Bin edges sit at 10^(k / bins_per_decade), so rescaling
/// the sample by a power of ten shifts the bins without changing them.
/// Requires >= 50 positive samples spanning at least one decade and >= 3
/// nonempty bins; throws DataError otherwise.
PowerLawFit fit_power_law(std::span<const double> samples, int bins_per_decade = 10);

}  // namespace forumpaths
