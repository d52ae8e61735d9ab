// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "ghg/oracle.hpp"
#include "ghg/pipeline.hpp"
#include "ghg/pose_fit.hpp"
#include "ghg/submodels.hpp"
#include "ghg/synth.hpp"

namespace {

const ghg::GeneratedScene& scene() {
  static const ghg::GeneratedScene g = [] {
    ghg::SyntheticScenario s;
    s.rng_seed = 7;
    s.true_pose = ghg::random_pose(7);
    return ghg::generate_scene(s);
  }();
  return g;
}

void BM_MemoizeSerial(benchmark::State& st) {
  const auto m = ghg::build_stage_one_model(scene().scene, ghg::HyperParams::stage_one());
  for (auto _ : st) {
    auto copy = m;
    copy.memoize_pairwise_serial();
    benchmark::DoNotOptimize(copy);
  }
}
void BM_MemoizeParallel(benchmark::State& st) {
  const auto m = ghg::build_stage_one_model(scene().scene, ghg::HyperParams::stage_one());
  for (auto _ : st) {
    auto copy = m;
    copy.memoize_pairwise();
    benchmark::DoNotOptimize(copy);
  }
}

void BM_DiameterSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(ghg::point_cloud_diameter_serial(scene().object_points));
}
void BM_DiameterParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(ghg::point_cloud_diameter(scene().object_points));
}

ghg::GraphicalModel bench_binary() {
  ghg::Rng rng(11);
  return ghg::random_binary_model(rng, 18);
}
void BM_BruteForceSerial(benchmark::State& st) {
  const auto m = bench_binary();
  for (auto _ : st) benchmark::DoNotOptimize(ghg::brute_force_serial(m));
}
void BM_BruteForceParallel(benchmark::State& st) {
  const auto m = bench_binary();
  for (auto _ : st) benchmark::DoNotOptimize(ghg::brute_force(m));
}

struct Decomposition {
  ghg::GraphicalModel master;
  std::vector<ghg::SubmodelSpec> specs;
};
const Decomposition& decomposition() {
  static const Decomposition d = [] {
    ghg::Rng rng(13);
    Decomposition d{ghg::random_zero_form_model(rng, 120, 0.3), {}};
    for (int k = 0; k < 16; ++k) {
      ghg::SubmodelSpec s;
      for (ghg::NodeId u = 0; u < 120; ++u)
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) s.node_set.push_back(u);
      d.specs.push_back(s);
    }
    return d;
  }();
  return d;
}
void BM_DecomposedSerial(benchmark::State& st) {
  const auto& d = decomposition();
  for (auto _ : st) benchmark::DoNotOptimize(ghg::solve_decomposed_serial(d.master, d.specs));
}
void BM_DecomposedParallel(benchmark::State& st) {
  const auto& d = decomposition();
  for (auto _ : st) benchmark::DoNotOptimize(ghg::solve_decomposed(d.master, d.specs));
}

std::vector<ghg::Hypothesis> bench_hypotheses() {
  const auto& g = scene();
  std::vector<ghg::Hypothesis> hyps;
  ghg::Rng rng(17);
  std::normal_distribution<double> noise(0.0, 0.004);
  for (int k = 0; k < 8; ++k) {
    ghg::Hypothesis h;
    for (std::size_t i = 0; i < g.object_points.size(); i += 40) {
      h.correspondences.push_back({g.object_points[i], g.truth.pose.apply(g.object_points[i])});
    }
    h.pose = g.truth.pose;
    h.pose.translation += ghg::Vec3(noise(rng), noise(rng), noise(rng));
    hyps.push_back(h);
  }
  return hyps;
}
void BM_IcpSerial(benchmark::State& st) {
  const auto hyps = bench_hypotheses();
  const ghg::KdTree tree(scene().object_points);
  for (auto _ : st) benchmark::DoNotOptimize(ghg::refine_all_serial(hyps, tree, scene().scene.diameter));
}
void BM_IcpParallel(benchmark::State& st) {
  const auto hyps = bench_hypotheses();
  const ghg::KdTree tree(scene().object_points);
  for (auto _ : st) benchmark::DoNotOptimize(ghg::refine_all(hyps, tree, scene().scene.diameter));
}

}  // namespace

BENCHMARK(BM_MemoizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MemoizeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiameterSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiameterParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecomposedSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecomposedParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IcpSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IcpParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
