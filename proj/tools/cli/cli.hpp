#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace forumpaths::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

/// Tunables shared by the subcommands. Defaults are the published values;
/// every field is overridable from a config file or a flag (flags win).
struct PipelineConfig {
  std::vector<std::string> events;     // event logs (csv / jsonl)
  std::vector<std::string> paths;      // path archives (*.paths.jsonl)
  std::string format;                  // csv | jsonl | "" (by extension)
  std::string registrations;
  std::string window;                  // "begin,end"
  std::string policy = "lenient";
  double sample_fraction = 0.3;
  std::uint64_t seed = 0;
  std::int64_t min_length_pearson = 10;
  std::int64_t min_length_postruns = 20;
  double alpha = 0.05;
  double kde_bandwidth = 2.0;
  double deadzone_percentile = 5.0;
  std::vector<double> p_harsh_grid{0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
  std::string normalization = "by_stddev";
  std::string output_dir = "forumpaths_out";
  std::size_t min_events_timing = 10;
  int bins_per_decade = 10;
  bool linear_color = false;
};

/// Entry point shared by the executable and the tests. Machine-readable
/// errors go to `err` as a single JSON line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace forumpaths::cli
