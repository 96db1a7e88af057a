#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "forumpaths/forumpaths.hpp"
#include "support.hpp"

namespace forumpaths::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string dump(const ojson& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Input loading

struct ForumData {
  ForumArchive archive;
  std::vector<RawEvent> events;  // validated log; empty for path archives
  bool from_events = false;
  std::size_t authors = 0;
  std::size_t retained = 0;
};

struct LoadedInput {
  std::vector<ForumData> forums;
  ojson ingest_report;
};

LogFormat format_for(const std::string& file, const std::string& forced) {
  if (!forced.empty()) return parse_log_format(forced);
  const auto ext = fs::path(file).extension().string();
  if (ext == ".csv") return LogFormat::csv;
  if (ext == ".jsonl" || ext == ".json") return LogFormat::jsonl;
  throw std::invalid_argument(
      fmt::format("cannot infer the format of '{}'; pass --format csv|jsonl", file));
}

bool is_date_only(std::string_view s) {
  return s.size() == 10 && s[4] == '-' && s[7] == '-';
}

Timestamp parse_window_bound(std::string s, bool is_end) {
  s.erase(0, s.find_first_not_of(' '));
  s.erase(s.find_last_not_of(' ') + 1);
  if (is_date_only(s)) return parse_timestamp(s + (is_end ? "T23:59:59Z" : "T00:00:00Z"));
  return parse_timestamp(s);
}

std::optional<TimeWindow> parse_window(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("--window expects 'begin,end'");
  try {
    TimeWindow w{parse_window_bound(text.substr(0, comma), false),
                 parse_window_bound(text.substr(comma + 1), true)};
    if (w.end < w.begin) throw std::invalid_argument("--window end precedes its beginning");
    return w;
  } catch (const DataError& e) {
    throw std::invalid_argument(fmt::format("--window: {}", e.what()));
  }
}

LoadedInput load_inputs(const PipelineConfig& cfg) {
  if (cfg.events.empty() && cfg.paths.empty())
    throw std::invalid_argument("no input: pass --events and/or --paths");

  LoadedInput loaded;
  ojson report;
  report["parse_errors"] = ojson::array();
  report["warnings"] = ojson::array();
  report["forums"] = ojson::object();

  if (!cfg.events.empty()) {
    std::vector<RawEvent> all;
    for (const auto& file : cfg.events) {
      const auto format = format_for(file, cfg.format);
      std::istringstream in(read_text_file(file));
      auto parsed = parse_event_log(in, format);
      for (auto& issue : parsed.errors)
        report["parse_errors"].push_back({{"file", file}, {"line", issue.line}, {"message", issue.message}});
      all.insert(all.end(), std::make_move_iterator(parsed.events.begin()),
                 std::make_move_iterator(parsed.events.end()));
    }
    const auto policy = parse_validation_policy(cfg.policy);
    if (policy == ValidationPolicy::strict && !report["parse_errors"].empty())
      throw DataError(fmt::format("{} malformed row(s) under the strict policy",
                                  report["parse_errors"].size()));

    std::optional<RegistrationTable> registrations;
    if (!cfg.registrations.empty()) {
      std::istringstream in(read_text_file(cfg.registrations));
      registrations = parse_registration_csv(in);
    }
    const auto window = parse_window(cfg.window);

    auto validated = resolve_and_validate(std::move(all), {policy, std::nullopt});
    for (auto& w : validated.warnings) report["warnings"].push_back(w);

    for (auto& [forum, events] : validated.forums) {
      auto scope = scope_registration(events, registrations ? &*registrations : nullptr, window, policy);
      for (auto& w : scope.warnings) report["warnings"].push_back(w);
      const auto sampled =
          scope.retained.empty()
              ? std::set<std::string>{}
              : sample_users(scope.retained, cfg.sample_fraction, derive_seed(cfg.seed, forum));
      std::map<std::string, Timestamp> registration;
      for (const auto& u : sampled) registration.emplace(u, scope.registration.at(u));

      ForumData data;
      data.archive = build_archive(forum, events, registration);
      data.from_events = true;
      data.authors = authors_of(events).size();
      data.retained = scope.retained.size();
      report["forums"][forum] = {{"events", events.size()},
                                 {"authors", data.authors},
                                 {"users_retained", data.retained},
                                 {"users_sampled", sampled.size()}};
      data.events = std::move(events);
      loaded.forums.push_back(std::move(data));
    }
  }

  for (const auto& file : cfg.paths) {
    std::istringstream in(read_text_file(file));
    auto stem = fs::path(file).filename().string();
    if (const auto dot = stem.find('.'); dot != std::string::npos) stem.erase(dot);
    ForumData data;
    data.archive = read_paths_jsonl(in, stem);
    data.authors = data.retained = data.archive.size();
    report["forums"][data.archive.forum_id] = {{"users", data.archive.size()}, {"source", file}};
    loaded.forums.push_back(std::move(data));
  }

  std::set<std::string> seen;
  for (const auto& f : loaded.forums)
    if (!seen.insert(f.archive.forum_id).second)
      throw DataError(fmt::format("forum '{}' appears in more than one input", f.archive.forum_id));

  loaded.ingest_report = std::move(report);
  return loaded;
}

// ---------------------------------------------------------------------------
// Per-forum computations. Each returns staged artifacts only.

ojson number_or_null(const std::function<double()>& compute) {
  try {
    return compute();
  } catch (const UndefinedStatistic&) {
    return nullptr;
  } catch (const std::invalid_argument&) {
    return nullptr;
  }
}

double mean_path_pearson(const ForumArchive& archive, std::int64_t min_length, std::size_t& used) {
  double sum = 0.0;
  used = 0;
  for (const auto& [_, h] : archive.users) {
    if (static_cast<std::int64_t>(h.path.length()) < min_length) continue;
    try {
      sum += path_pearson(h.path);
      ++used;
    } catch (const UndefinedStatistic&) {
    }
  }
  if (used == 0) throw UndefinedStatistic("no user qualifies for the Pearson consistency check");
  return sum / static_cast<double>(used);
}

ojson correlation_report(const ForumData& forum, const PipelineConfig& cfg) {
  const auto& archive = forum.archive;
  ojson doc;
  doc["forum"] = archive.forum_id;
  doc["users"] = archive.size();

  std::size_t pearson_users = 0;
  doc["mean_path_pearson"] = number_or_null(
      [&] { return mean_path_pearson(archive, cfg.min_length_pearson, pearson_users); });
  doc["pearson_min_length"] = cfg.min_length_pearson;
  doc["pearson_users"] = pearson_users;

  std::vector<double> length_up, up_time;
  for (const auto& [_, h] : archive.users) {
    if (auto up = user_up_time(h)) {
      length_up.push_back(static_cast<double>(h.path.length()));
      up_time.push_back(static_cast<double>(*up));
    }
  }
  doc["spearman_length_vs_up_time"] = number_or_null([&] { return stats::spearman(length_up, up_time); });

  if (forum.from_events) {
    const auto graph = build_reply_graph(forum.events);
    std::vector<double> lengths, degrees;
    for (const auto& [user, h] : archive.users) {
      lengths.push_back(static_cast<double>(h.path.length()));
      auto it = graph.find(user);
      degrees.push_back(it == graph.end() ? 0.0 : static_cast<double>(it->second.total()));
    }
    doc["spearman_length_vs_degree"] = number_or_null([&] { return stats::spearman(lengths, degrees); });
  } else {
    doc["spearman_length_vs_degree"] = nullptr;
  }
  return doc;
}

struct FeatureOutput {
  ForumFeatures features;
  ArtifactSet artifacts;
};

FeatureOutput features_for(const ForumArchive& archive) {
  FeatureOutput out;
  out.features = compute_forum_features(archive);
  const auto stem = file_stem_for(archive.forum_id);
  if (archive.size() >= 2) {
    const auto influence = all_slope_influences(archive);
    std::string csv = "user_id,influence\n";
    std::vector<double> values;
    for (const auto& [user, v] : influence) {
      csv += fmt::format("{},{}\n", user, v);
      values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    auto nearest_rank = [&](double q) {
      auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
      return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
    };
    ojson summary;
    summary["forum"] = archive.forum_id;
    summary["users"] = values.size();
    summary["central_99_interval"] = {nearest_rank(0.005), nearest_rank(0.995)};
    summary["min"] = values.front();
    summary["max"] = values.back();
    out.artifacts.add(stem + ".influence.csv", std::move(csv));
    out.artifacts.add(stem + ".influence.json", dump(summary));
  }
  return out;
}

ArtifactSet deadzone_for(const ForumArchive& archive, const PipelineConfig& cfg, ojson* summary_out) {
  const auto q = collect_points(archive);
  const auto grid = estimate_density(q, cfg.kde_bandwidth);
  const auto result = compute_dead_zone(grid, q, cfg.deadzone_percentile);
  const auto outliers = flag_outlier_users(archive, result);

  ArtifactSet set;
  const auto stem = file_stem_for(archive.forum_id);
  std::ostringstream density, outlier_csv;
  write_density_csv(density, grid, result);
  write_outliers_csv(outlier_csv, outliers);
  ojson summary;
  summary["forum"] = archive.forum_id;
  summary["bandwidth"] = cfg.kde_bandwidth;
  summary["percentile"] = cfg.deadzone_percentile;
  summary["extent"] = grid.extent();
  summary["threshold"] = result.threshold;
  summary["observed_occurrences"] = q.size();
  summary["outlier_occurrences"] = result.outliers.size();
  summary["dead_zone_points"] = result.mask_size();
  summary["users_with_outliers"] = outliers.size();
  set.add(stem + ".density.csv", density.str());
  set.add(stem + ".outliers.csv", outlier_csv.str());
  set.add(stem + ".deadzone.json", dump(summary));
  if (summary_out) *summary_out = std::move(summary);
  return set;
}

ArtifactSet timing_for(const ForumArchive& archive, const PipelineConfig& cfg, bool tolerate_small,
                       ojson* summary_out) {
  const auto pooled = normalize_and_pool(archive, cfg.min_events_timing);
  ArtifactSet set;
  const auto stem = file_stem_for(archive.forum_id);
  std::string csv = "normalized_delta\n";
  for (double d : pooled) csv += fmt::format("{}\n", d);

  ojson summary;
  summary["forum"] = archive.forum_id;
  summary["samples"] = pooled.size();
  summary["min_events"] = cfg.min_events_timing;
  try {
    const auto fit = fit_power_law(pooled, cfg.bins_per_decade);
    summary["exponent"] = fit.exponent;
    summary["range"] = {fit.fit_min, fit.fit_max};
    summary["bins"] = fit.bins;
    summary["residual"] = fit.residual;
  } catch (const DataError& e) {
    if (!tolerate_small) throw;
    summary["exponent"] = nullptr;
    summary["skipped"] = e.what();
  }
  set.add(stem + ".deltas.csv", std::move(csv));
  set.add(stem + ".powerlaw.json", dump(summary));
  if (summary_out) *summary_out = std::move(summary);
  return set;
}

ArtifactSet viz_for(const ForumArchive& archive, const ForumFeatures& features, const PipelineConfig& cfg) {
  const auto grid = path_density_grid(archive);
  PlotOptions options;
  options.log_color = !cfg.linear_color;
  options.title = archive.forum_id;
  ArtifactSet set;
  const auto stem = file_stem_for(archive.forum_id);
  std::ostringstream csv;
  write_path_density_csv(csv, grid);
  set.add(stem + ".pathdensity.csv", csv.str());
  set.add(stem + ".svg", render_forum_plot(grid, features, options));
  return set;
}

struct ClusterChoice {
  std::string mode;
  std::string linkage = "ward";
  std::size_t k = 2;
  bool drop_offset = false;
  std::vector<std::string> columns;
};

ArtifactSet cluster_for(const std::vector<NamedFeatures>& rows, const ClusterChoice& choice,
                        ojson* summary_out) {
  std::vector<FeatureColumn> columns;
  if (!choice.columns.empty()) {
    for (const auto& c : choice.columns) columns.push_back(parse_feature_column(c));
  } else {
    columns = choice.drop_offset ? baseline_only_columns() : default_cluster_columns();
  }
  const auto matrix = normalize_feature_matrix(rows, columns, parse_normalization_mode(choice.mode));
  const auto dendrogram = hierarchical_clustering(matrix, parse_linkage(choice.linkage));
  const auto partition = cut_dendrogram(dendrogram, choice.k);

  ArtifactSet set;
  std::ostringstream csv;
  write_partition_csv(csv, dendrogram, partition);
  set.add("partition.csv", csv.str());
  set.add("dendrogram.json", dendrogram_to_json(dendrogram) + "\n");
  set.add("dendrogram.nwk", dendrogram_to_newick(dendrogram) + "\n");
  set.add("dendrogram.svg", render_dendrogram(dendrogram));
  if (summary_out) {
    ojson s;
    s["mode"] = choice.mode;
    s["linkage"] = choice.linkage;
    s["k"] = choice.k;
    ojson cols = ojson::array();
    for (auto c : columns) cols.push_back(std::string(to_string(c)));
    s["columns"] = cols;
    ojson groups = ojson::object();
    for (std::size_t i = 0; i < partition.size(); ++i) groups[dendrogram.labels[i]] = partition[i];
    s["partition"] = groups;
    *summary_out = std::move(s);
  }
  return set;
}

std::string features_csv(const std::vector<NamedFeatures>& rows) {
  std::ostringstream out;
  write_features_csv(out, rows);
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommands

struct CommandContext {
  PipelineConfig cfg;
  std::ostream* out = nullptr;
};

void finish(const ArtifactSet& set, const CommandContext& ctx) {
  const auto written = set.commit(ctx.cfg.output_dir);
  for (const auto& p : written) *ctx.out << p.string() << '\n';
}

void cmd_ingest(CommandContext& ctx) {
  auto input = load_inputs(ctx.cfg);
  ArtifactSet set;
  for (const auto& forum : input.forums) {
    std::ostringstream paths;
    write_paths_jsonl(paths, forum.archive);
    const auto stem = file_stem_for(forum.archive.forum_id);
    set.add(stem + ".paths.jsonl", paths.str());
    set.add(stem + ".correlations.json", dump(correlation_report(forum, ctx.cfg)));
  }
  set.add("ingest_report.json", dump(input.ingest_report));
  finish(set, ctx);
}

void cmd_features(CommandContext& ctx, const std::string& counts_file) {
  ArtifactSet set;
  std::vector<NamedFeatures> rows;
  if (!counts_file.empty()) {
    std::istringstream in(read_text_file(counts_file));
    for (const auto& c : read_counts_csv(in)) {
      NamedFeatures row;
      row.forum = c.forum;
      row.features.size = c.users;
      row.features.length = length_from_counts(c);
      row.features.base = baseline_from_counts(c);
      row.features.slope = row.features.offset = row.features.spread = std::nan("");
      rows.push_back(std::move(row));
    }
  } else {
    auto input = load_inputs(ctx.cfg);
    for (const auto& forum : input.forums) {
      auto result = features_for(forum.archive);
      rows.push_back({forum.archive.forum_id, result.features});
      set.merge(std::move(result.artifacts));
    }
  }
  set.add("features.csv", features_csv(rows));
  finish(set, ctx);
}

void cmd_model_fit(CommandContext& ctx, const std::string& model, std::optional<double> p_harsh,
                   int replicates) {
  auto input = load_inputs(ctx.cfg);
  const bool want_coin = model == "coin" || model == "both";
  const bool want_sticking = model == "sticking" || model == "both";
  if (!want_coin && !want_sticking) throw std::invalid_argument(fmt::format("unknown model '{}'", model));

  ArtifactSet set;
  ojson summary = ojson::array();
  for (const auto& forum : input.forums) {
    const auto& archive = forum.archive;
    const auto stem = file_stem_for(archive.forum_id);
    ModelFitOptions options;
    options.min_length = ctx.cfg.min_length_postruns;
    options.alpha = ctx.cfg.alpha;
    options.replicates = replicates;
    options.seed = derive_seed(ctx.cfg.seed, archive.forum_id);

    ojson row;
    row["dataset"] = archive.forum_id;
    if (want_coin) {
      options.model = PathModel::coin;
      const auto report = evaluate_model_fit(archive, options);
      std::ostringstream csv;
      write_model_fit_csv(csv, report);
      set.add(stem + ".model_fit_coin.csv", csv.str());
      row["users_tested"] = report.users_tested;
      row["users_passed_coin"] = report.users_passed;
    }
    if (want_sticking) {
      ModelFitReport report;
      if (p_harsh) {
        options.model = PathModel::sticking;
        options.p_harsh = p_harsh;
        report = evaluate_model_fit(archive, options);
      } else {
        auto search = search_p_harsh(archive, ctx.cfg.p_harsh_grid, options);
        ojson grid = ojson::array();
        for (const auto& [value, passed] : search.passed_by_value)
          grid.push_back({{"p_harsh", value}, {"users_passed", passed}});
        row["grid"] = grid;
        report = std::move(search.best_report);
      }
      std::ostringstream csv;
      write_model_fit_csv(csv, report);
      set.add(stem + ".model_fit_sticking.csv", csv.str());
      row["users_tested"] = report.users_tested;
      row["users_passed_sticking"] = report.users_passed;
      row["p_harsh"] = *report.p_harsh;
    }
    std::size_t pearson_users = 0;
    row["mean_path_pearson"] = number_or_null(
        [&] { return mean_path_pearson(archive, ctx.cfg.min_length_pearson, pearson_users); });
    row["pearson_users"] = pearson_users;
    row["alpha"] = ctx.cfg.alpha;
    row["seed"] = ctx.cfg.seed;
    row["rng"] = std::string(SeededRng::kAlgorithm);
    summary.push_back(std::move(row));
  }
  set.add("model_fit.json", dump(summary));
  finish(set, ctx);
}

void cmd_deadzone(CommandContext& ctx) {
  auto input = load_inputs(ctx.cfg);
  ArtifactSet set;
  for (const auto& forum : input.forums) set.merge(deadzone_for(forum.archive, ctx.cfg, nullptr));
  finish(set, ctx);
}

void cmd_timing(CommandContext& ctx) {
  auto input = load_inputs(ctx.cfg);
  ArtifactSet set;
  for (const auto& forum : input.forums) set.merge(timing_for(forum.archive, ctx.cfg, false, nullptr));
  finish(set, ctx);
}

void cmd_viz(CommandContext& ctx) {
  auto input = load_inputs(ctx.cfg);
  ArtifactSet set;
  for (const auto& forum : input.forums)
    set.merge(viz_for(forum.archive, compute_forum_features(forum.archive), ctx.cfg));
  finish(set, ctx);
}

void cmd_cluster(CommandContext& ctx, const std::string& features_file, ClusterChoice choice) {
  if (features_file.empty()) throw std::invalid_argument("cluster requires --features FILE");
  std::istringstream in(read_text_file(features_file));
  const auto rows = read_features_csv(in);
  choice.mode = ctx.cfg.normalization;
  ojson summary;
  auto set = cluster_for(rows, choice, &summary);
  set.add("cluster.json", dump(summary));
  finish(set, ctx);
}

struct SynthArgs {
  std::int64_t users = 200;
  std::string length = "100";
  std::string p_post = "0.75";
  std::optional<double> p_harsh;
  double timing_exponent = -1.7;
  std::string forum = "synthetic";
};

void cmd_synth(CommandContext& ctx, const SynthArgs& args) {
  SynthOptions options;
  options.forum_id = args.forum;
  options.users = args.users;
  options.length = LengthSpec::parse(args.length);
  options.p_post = UniformSpec::parse(args.p_post);
  options.p_harsh = args.p_harsh;
  options.timing_exponent = args.timing_exponent;
  options.seed = ctx.cfg.seed;
  const auto archive = generate_synthetic_archive(options);
  std::ostringstream out;
  write_paths_jsonl(out, archive);
  ArtifactSet set;
  set.add(file_stem_for(archive.forum_id) + ".paths.jsonl", out.str());
  finish(set, ctx);
}

void collect_directory(const std::string& dir, PipelineConfig& cfg) {
  if (!fs::is_directory(dir)) throw DataError(fmt::format("'{}' is not a directory", dir));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto name = f.filename().string();
    if (name.ends_with(".paths.jsonl"))
      cfg.paths.push_back(f.string());
    else if (name.ends_with(".csv") || name.ends_with(".jsonl"))
      cfg.events.push_back(f.string());
  }
  if (cfg.paths.empty() && cfg.events.empty())
    throw DataError(fmt::format("no forum files (*.csv, *.jsonl, *.paths.jsonl) in '{}'", dir));
}

struct ForumReport {
  NamedFeatures features;
  ArtifactSet artifacts;
  ojson summary;
};

ForumReport report_forum(const ForumData& forum, const PipelineConfig& cfg) {
  ForumReport r;
  const auto& archive = forum.archive;
  const auto stem = file_stem_for(archive.forum_id);

  auto feats = features_for(archive);
  r.features = {archive.forum_id, feats.features};
  r.artifacts.merge(std::move(feats.artifacts));

  std::ostringstream paths;
  write_paths_jsonl(paths, archive);
  r.artifacts.add(stem + ".paths.jsonl", paths.str());
  const auto correlations = correlation_report(forum, cfg);
  r.artifacts.add(stem + ".correlations.json", dump(correlations));

  ojson deadzone, timing;
  r.artifacts.merge(deadzone_for(archive, cfg, &deadzone));
  r.artifacts.merge(timing_for(archive, cfg, true, &timing));
  r.artifacts.merge(viz_for(archive, feats.features, cfg));

  const auto& f = feats.features;
  r.summary["forum"] = archive.forum_id;
  r.summary["features"] = {{"size", f.size},   {"length", f.length}, {"slope", f.slope},
                           {"base", f.base},   {"offset", f.offset}, {"spread", f.spread},
                           {"degenerate_slope", f.degenerate_slope}};
  r.summary["correlations"] = correlations;
  r.summary["deadzone"] = deadzone;
  r.summary["timing"] = timing;
  return r;
}

void cmd_report(CommandContext& ctx, const std::string& input_dir, ClusterChoice choice) {
  if (!input_dir.empty()) collect_directory(input_dir, ctx.cfg);
  auto input = load_inputs(ctx.cfg);
  if (input.forums.empty()) throw DataError("no forums to report on");

  // Forums are independent; the clustering step waits for all of them.
  std::vector<std::future<ForumReport>> jobs;
  for (const auto& forum : input.forums)
    jobs.push_back(std::async(std::launch::async, report_forum, std::cref(forum), std::cref(ctx.cfg)));

  ArtifactSet set;
  std::vector<NamedFeatures> rows;
  ojson forums = ojson::array();
  for (auto& job : jobs) {
    auto r = job.get();
    rows.push_back(r.features);
    forums.push_back(std::move(r.summary));
    set.merge(std::move(r.artifacts));
  }
  set.add("features.csv", features_csv(rows));
  set.add("ingest_report.json", dump(input.ingest_report));

  ojson doc;
  doc["forums"] = std::move(forums);
  choice.mode = ctx.cfg.normalization;
  try {
    ojson cluster;
    set.merge(cluster_for(rows, choice, &cluster));
    doc["cluster"] = std::move(cluster);
  } catch (const std::exception& e) {
    if (rows.size() >= 2 && !dynamic_cast<const DataError*>(&e)) throw;
    doc["cluster"] = {{"skipped", e.what()}};
  }
  doc["seed"] = ctx.cfg.seed;
  set.add("report.json", dump(doc));
  finish(set, ctx);
}

// ---------------------------------------------------------------------------
// Argument handling

void add_input_options(CLI::App* sub, PipelineConfig& cfg) {
  sub->add_option("--events", cfg.events, "Event logs (csv or jsonl)")->delimiter(',');
  sub->add_option("--paths", cfg.paths, "Path archives (*.paths.jsonl)")->delimiter(',');
  sub->add_option("--format", cfg.format, "Force the event log format")->check(CLI::IsMember({"csv", "jsonl"}));
  sub->add_option("--registrations", cfg.registrations, "CSV user_id,registration_timestamp");
  sub->add_option("--window", cfg.window, "Registration window 'begin,end' (dates or timestamps)");
  sub->add_option("--policy", cfg.policy, "Validation policy")->check(CLI::IsMember({"strict", "lenient"}));
  sub->add_option("--sample-fraction", cfg.sample_fraction, "Fraction of users sampled per forum");
  sub->add_option("--seed", cfg.seed, "Random seed");
}

// Adds "--key value" for config entries the chosen subcommand understands
// and the command line does not set.
std::vector<std::string> apply_config(CLI::App& app, const std::vector<std::string>& args) {
  std::string config_file;
  CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_file = args[i + 1];
    if (args[i].starts_with("--config=")) config_file = args[i].substr(9);
    if (!sub && !args[i].starts_with("-")) sub = app.get_subcommand_no_throw(args[i]);
  }
  if (config_file.empty() || !sub) return args;

  auto given = [&](const std::string& key) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == "--" + key || a.starts_with("--" + key + "=");
    });
  };
  std::vector<std::string> out = args;
  for (const auto& [key, value] : read_config_file(config_file)) {
    if (key == "config" || given(key)) continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) continue;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1" || value == "yes") out.push_back("--" + key);
    } else {
      out.push_back("--" + key + "=" + value);
    }
  }
  return out;
}

void print_error(std::ostream& err, std::string_view kind, std::string_view message) {
  nlohmann::ordered_json doc;
  doc["status"] = "error";
  doc["kind"] = kind;
  doc["message"] = message;
  err << doc.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CommandContext ctx;
  ctx.out = &out;
  auto& cfg = ctx.cfg;

  CLI::App app{"Decoupled user-path analysis of threaded forum logs", "forumpaths"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file;
  app.add_option("--config", config_file, "key = value config file; flags override it");
  app.add_option("--out", cfg.output_dir, "Output directory")->envname("FORUMPATHS_OUTPUT_DIR");

  auto* ingest = app.add_subcommand("ingest", "Decouple event logs into path archives");
  add_input_options(ingest, cfg);
  ingest->add_option("--min-length-pearson", cfg.min_length_pearson, "Minimum path length for Pearson");

  std::string counts_file;
  auto* features = app.add_subcommand("features", "Compute the six forum features");
  add_input_options(features, cfg);
  features->add_option("--counts", counts_file, "CSV forum,users,posts,replies (base/length only)");

  std::string model = "both";
  std::optional<double> p_harsh;
  int replicates = 1;
  auto* model_fit = app.add_subcommand("model-fit", "KS evaluation of the coin-toss and sticking models");
  add_input_options(model_fit, cfg);
  model_fit->add_option("--model", model, "coin, sticking or both")->check(CLI::IsMember({"coin", "sticking", "both"}));
  model_fit->add_option("--p-harsh", p_harsh, "Fixed p_harsh (default: grid search)")->check(CLI::Range(0.0, 1.0));
  model_fit->add_option("--p-harsh-grid", cfg.p_harsh_grid, "Grid of p_harsh values")->delimiter(',');
  model_fit->add_option("--min-length-postruns", cfg.min_length_postruns, "Minimum path length tested");
  model_fit->add_option("--min-length-pearson", cfg.min_length_pearson, "Minimum path length for Pearson");
  model_fit->add_option("--alpha", cfg.alpha, "KS significance level")->check(CLI::Range(0.0, 1.0));
  model_fit->add_option("--replicates", replicates, "Synthetic paths per user (majority vote)")->check(CLI::PositiveNumber);

  auto* deadzone = app.add_subcommand("deadzone", "Kernel density and dead-zone mask");
  add_input_options(deadzone, cfg);
  deadzone->add_option("--kde-bandwidth", cfg.kde_bandwidth, "Gaussian kernel sigma")->check(CLI::PositiveNumber);
  deadzone->add_option("--deadzone-percentile", cfg.deadzone_percentile, "Threshold percentile")->check(CLI::Range(0.0, 100.0));

  auto* timing = app.add_subcommand("timing", "Normalized inter-event times and power-law fit");
  add_input_options(timing, cfg);
  timing->add_option("--min-events", cfg.min_events_timing, "Minimum events per user");
  timing->add_option("--bins-per-decade", cfg.bins_per_decade, "Logarithmic bins per decade")->check(CLI::PositiveNumber);

  std::string features_file;
  ClusterChoice choice;
  auto* cluster = app.add_subcommand("cluster", "Hierarchical clustering of forum features");
  cluster->add_option("--features", features_file, "Features CSV")->required();
  cluster->add_option("--mode,--normalization", cfg.normalization, "by_stddev or by_variance")->check(CLI::IsMember({"by_stddev", "by_variance"}));
  cluster->add_option("--k", choice.k, "Number of groups")->check(CLI::PositiveNumber);
  cluster->add_option("--linkage", choice.linkage, "ward, single or average")->check(CLI::IsMember({"ward", "single", "average"}));
  cluster->add_flag("--drop-offset", choice.drop_offset, "Cluster on base without offset");
  cluster->add_option("--columns", choice.columns, "Explicit feature columns")->delimiter(',');

  auto* viz = app.add_subcommand("viz", "Superimposed path plots");
  add_input_options(viz, cfg);
  viz->add_flag("--linear-color", cfg.linear_color, "Linear instead of log color scale");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic path archive");
  synth->add_option("--users", synth_args.users, "Number of users")->check(CLI::PositiveNumber);
  synth->add_option("--length", synth_args.length, "Path length: N, uniform:A:B or geometric:MEAN");
  synth->add_option("--p-post", synth_args.p_post, "p_post: value or uniform:A:B");
  synth->add_option("--p-harsh", synth_args.p_harsh, "Sticking model strength (default: coin toss)")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--timing-exponent", synth_args.timing_exponent, "Inter-event density exponent (< -1)");
  synth->add_option("--forum", synth_args.forum, "Forum id");
  synth->add_option("--seed", cfg.seed, "Random seed");

  std::string input_dir;
  auto* report = app.add_subcommand("report", "Full per-forum pipeline plus clustering");
  add_input_options(report, cfg);
  report->add_option("--input", input_dir, "Directory of forum files");
  report->add_option("--min-length-pearson", cfg.min_length_pearson, "Minimum path length for Pearson");
  report->add_option("--kde-bandwidth", cfg.kde_bandwidth, "Gaussian kernel sigma")->check(CLI::PositiveNumber);
  report->add_option("--deadzone-percentile", cfg.deadzone_percentile, "Threshold percentile")->check(CLI::Range(0.0, 100.0));
  report->add_option("--min-events", cfg.min_events_timing, "Minimum events per user for timing");
  report->add_option("--bins-per-decade", cfg.bins_per_decade, "Logarithmic bins per decade")->check(CLI::PositiveNumber);
  report->add_option("--mode,--normalization", cfg.normalization, "by_stddev or by_variance")->check(CLI::IsMember({"by_stddev", "by_variance"}));
  report->add_option("--k", choice.k, "Number of groups")->check(CLI::PositiveNumber);
  report->add_flag("--drop-offset", choice.drop_offset, "Cluster on base without offset");
  report->add_flag("--linear-color", cfg.linear_color, "Linear instead of log color scale");

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = apply_config(app, args);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    print_error(err, "usage", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    print_error(err, "data", e.what());
    return kDataError;
  }

  try {
    if (*ingest) cmd_ingest(ctx);
    else if (*features) cmd_features(ctx, counts_file);
    else if (*model_fit) cmd_model_fit(ctx, model, p_harsh, replicates);
    else if (*deadzone) cmd_deadzone(ctx);
    else if (*timing) cmd_timing(ctx);
    else if (*cluster) cmd_cluster(ctx, features_file, choice);
    else if (*viz) cmd_viz(ctx);
    else if (*synth) cmd_synth(ctx, synth_args);
    else if (*report) cmd_report(ctx, input_dir, choice);
  } catch (const std::invalid_argument& e) {
    print_error(err, "usage", e.what());
    return kUsage;
  } catch (const DataError& e) {
    print_error(err, "data", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return kInternal;
  }
  return kOk;
}

}  // namespace forumpaths::cli
