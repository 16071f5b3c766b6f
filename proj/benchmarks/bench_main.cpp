#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vlsm/cluster.hpp"
#include "vlsm/permute.hpp"
#include "vlsm/stats.hpp"
#include "vlsm/synth.hpp"

using namespace vlsm;

namespace {

BinaryMask random_mask(int n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(density);
  BinaryMask m(VolumeGeometry({n, n, n}, {1, 1, 1}));
  for (std::size_t i = 0; i < m.voxel_count(); ++i) m.set(i, on(rng));
  return m;
}

// Desk-scale synthetic cohort: 32^3 grid, 60 subjects.
const SyntheticCohort& desk_cohort() {
  static const SyntheticCohort cohort = [] {
    SyntheticCohortSpec spec;
    spec.geometry = VolumeGeometry({32, 32, 32}, {2, 2, 2});
    spec.brain_mask = make_ellipsoid(spec.geometry, {15.5, 15.5, 15.5}, {13, 13, 13});
    spec.roi = make_box(spec.geometry, {14, 14, 14}, {18, 17, 17});
    spec.growth_bias = 0.25;
    spec.seed = 9;
    return generate_cohort(spec);
  }();
  return cohort;
}

void BM_LabelComponents(benchmark::State& state) {
  const BinaryMask m = random_mask(static_cast<int>(state.range(0)), 0.3, 1);
  const auto connectivity = connectivity_from_int(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(label_components(m, connectivity));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.voxel_count()));
}
BENCHMARK(BM_LabelComponents)->Args({32, 6})->Args({32, 26})->Args({64, 26});

void BM_SparseSizes(benchmark::State& state) {
  const BinaryMask m = random_mask(32, 0.01 * static_cast<double>(state.range(0)), 2);
  ComponentLabeler labeler(m.geometry(), Connectivity::kCorner26);
  const auto voxels = m.true_indices();
  std::vector<std::size_t> sizes;
  for (auto _ : state) {
    labeler.sizes_from_voxels(voxels, sizes);
    benchmark::DoNotOptimize(sizes.data());
  }
}
BENCHMARK(BM_SparseSizes)->Arg(1)->Arg(5)->Arg(20);

void BM_CompactT(benchmark::State& state) {
  const Cohort& cohort = desk_cohort().cohort;
  const LesionDesign design(cohort, 2);
  std::vector<double> sum, sum_sq, t;
  for (auto _ : state) {
    design.compact_t(cohort.scores(), sum, sum_sq, t);
    benchmark::DoNotOptimize(t.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(design.analyzable_voxels().size()));
}
BENCHMARK(BM_CompactT);

void BM_PermutationBatch(benchmark::State& state) {
  const Cohort& cohort = desk_cohort().cohort;
  PermutationConfig config;
  config.n_permutations = 100;
  config.mode = NullMode::kAllClusters;
  config.master_seed = 1;
  const BuildOptions options{static_cast<unsigned>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(build_null(cohort, config, options));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_PermutationBatch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
