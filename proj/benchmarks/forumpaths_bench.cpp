#include <benchmark/benchmark.h>

#include "forumpaths/forumpaths.hpp"

namespace fp = forumpaths;

namespace {

fp::ForumArchive bench_archive(int users, std::int64_t length) {
  fp::SynthOptions o;
  o.users = users;
  o.length = fp::LengthSpec{fp::LengthSpec::Kind::fixed, length, length, static_cast<double>(length)};
  o.p_post = fp::UniformSpec::parse("uniform:0.5:0.9");
  o.p_harsh = 0.8;
  o.seed = 1;
  return fp::generate_synthetic_archive(o);
}

void BM_EstimateDensity(benchmark::State& state) {
  const auto q = fp::collect_points(bench_archive(static_cast<int>(state.range(0)), 100));
  for (auto _ : state) benchmark::DoNotOptimize(fp::estimate_density(q, 2.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.size()));
}
BENCHMARK(BM_EstimateDensity)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_WardClustering(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  fp::SeededRng rng(2);
  fp::FeatureMatrix m;
  m.columns = fp::default_cluster_columns();
  for (std::size_t i = 0; i < n; ++i) {
    m.rows.push_back("r" + std::to_string(i));
    for (std::size_t c = 0; c < m.columns.size(); ++c) m.values.push_back(rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(fp::ward_clustering(m));
}
BENCHMARK(BM_WardClustering)->Arg(9)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_GenerateSticking(benchmark::State& state) {
  fp::SeededRng rng(3);
  const auto length = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(fp::generate_sticking(length, 0.7, 0.8, rng));
  state.SetItemsProcessed(state.iterations() * length);
}
BENCHMARK(BM_GenerateSticking)->Arg(100)->Arg(10000);

void BM_KsTwoSample(benchmark::State& state) {
  fp::SeededRng rng(4);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (auto& v : a) v = static_cast<double>(rng.below(8));
  for (auto& v : b) v = static_cast<double>(rng.below(9));
  for (auto _ : state) benchmark::DoNotOptimize(fp::ks_two_sample(a, b));
}
BENCHMARK(BM_KsTwoSample)->Arg(40)->Arg(4000);

void BM_SearchPHarsh(benchmark::State& state) {
  const auto archive = bench_archive(200, 100);
  const auto grid = fp::default_p_harsh_grid();
  for (auto _ : state) benchmark::DoNotOptimize(fp::search_p_harsh(archive, grid, {}));
}
BENCHMARK(BM_SearchPHarsh)->Unit(benchmark::kMillisecond);

void BM_ForumFeatures(benchmark::State& state) {
  const auto archive = bench_archive(static_cast<int>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(fp::compute_forum_features(archive));
}
BENCHMARK(BM_ForumFeatures)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
