#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ghg/oracle.hpp"
#include "ghg/pipeline.hpp"
#include "ghg/suites.hpp"
#include "ghg/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error(path + ": cannot write");
}

int cmd_generate(const std::string& scenario_path, const std::string& out, std::optional<std::uint64_t> seed) {
  ghg::SyntheticScenario s;
  try {
    s = ghg::load_scenario(scenario_path);
  } catch (const ghg::ParseError& e) {
    std::cerr << "generate: " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed) s.rng_seed = *seed;
  ghg::GeneratedScene g;
  try {
    g = ghg::generate_scene(s);
  } catch (const ghg::ContractError& e) {
    std::cerr << "generate: " << e.what() << "\n";
    return kExitUsage;
  }
  write_text(out, ghg::scene_to_json({g.scene, g.object_points, g.truth}));
  std::cerr << "generate: " << g.scene.grid_width << "x" << g.scene.grid_height << " nodes, "
            << g.visible_nodes << "/" << g.object_nodes << " object nodes visible, diameter "
            << g.scene.diameter << " m\n";
  return kExitOk;
}

int cmd_solve(const std::string& scene_path, const std::string& config_path, const std::string& object_path,
              const std::string& out, const std::string& scheme, bool canonical) {
  ghg::SceneFile file;
  ghg::PipelineConfig cfg;
  try {
    file = ghg::load_scene(scene_path);
    if (!config_path.empty()) cfg = ghg::load_config(config_path);
    if (!scheme.empty()) cfg.scheme = ghg::parse_scheme(scheme);
    if (!object_path.empty()) file.object_points = ghg::load_xyz(object_path);
  } catch (const ghg::ParseError& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return kExitUsage;
  }
  if (file.object_points.empty()) {
    std::cerr << "solve: the scene has no object_points; pass --object <xyz file>\n";
    return kExitUsage;
  }
  const ghg::RunReport r = ghg::run_pipeline(file, cfg);
  write_text(out, ghg::report_to_json(r, canonical));
  if (r.too_many_submodels) std::cerr << "solve: warning: " << r.submodels << " submodels\n";
  std::cerr << "solve: " << (r.detected ? "detected" : "no-detection") << ", inliers "
            << r.stage_one_inliers << ", submodels " << r.submodels << ", hypotheses "
            << r.hypothesis_count;
  if (r.detected) std::cerr << ", score " << r.score;
  if (r.evaluation) {
    std::cerr << ", avg distance " << r.evaluation->average_distance << " ("
              << (r.evaluation->correct ? "correct" : "wrong") << ")";
  }
  std::cerr << ", " << static_cast<long>(r.timings.total_ms) << " ms\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::size_t trials) {
  ghg::SuiteReport r;
  try {
    ghg::default_trials(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return kExitUsage;
  }
  r = ghg::run_suite(suite, seed, trials);
  for (const auto& f : r.failures) std::cout << "  " << f << "\n";
  std::printf("%s: %s %zu/%zu (%.2f s)\n", r.suite.c_str(), r.ok() ? "PASS" : "FAIL", r.passed,
              r.trials, r.seconds);
  return r.ok() ? kExitOk : kExitFailure;
}

template <typename F>
double time_ms(int reps, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
}

int cmd_bench(std::uint64_t seed, int reps) {
  ghg::SyntheticScenario s;
  s.rng_seed = seed;
  s.true_pose = ghg::random_pose(seed);
  const ghg::GeneratedScene g = ghg::generate_scene(s);
  const ghg::GraphicalModel stage_one = ghg::build_stage_one_model(g.scene, ghg::HyperParams::stage_one());
  std::printf("%-22s %12s %12s\n", "kernel", "serial ms", "parallel ms");
  auto row = [](const char* name, double a, double b) { std::printf("%-22s %12.3f %12.3f\n", name, a, b); };
  row("memoize_pairwise",
      time_ms(reps, [&] { auto m = stage_one; m.memoize_pairwise_serial(); }),
      time_ms(reps, [&] { auto m = stage_one; m.memoize_pairwise(); }));
  row("diameter", time_ms(reps, [&] { ghg::point_cloud_diameter_serial(g.object_points); }),
      time_ms(reps, [&] { ghg::point_cloud_diameter(g.object_points); }));
  ghg::Rng rng(seed);
  const ghg::GraphicalModel small = ghg::random_binary_model(rng, 18);
  row("brute_force(18 bin)", time_ms(reps, [&] { ghg::brute_force_serial(small); }),
      time_ms(reps, [&] { ghg::brute_force(small); }));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage graphical-model pose hypothesis generation"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a synthetic scene from a scenario file");
  std::string scenario, out;
  std::optional<std::uint64_t> seed;
  gen->add_option("scenario", scenario, "Scenario JSON")->required();
  gen->add_option("--out", out, "Scene JSON to write (stdout when omitted)");
  gen->add_option("--seed", seed, "Override the scenario seed");

  auto* solve = app.add_subcommand("solve", "Run the pipeline on a scene");
  std::string scene, config, object, scheme, report_out;
  bool canonical = false;
  solve->add_option("--scene", scene, "Scene JSON")->required();
  solve->add_option("--config", config, "Pipeline config (key = value)");
  solve->add_option("--object", object, "Object point cloud (xyz text) if the scene has none");
  solve->add_option("--out", report_out, "Report JSON to write (stdout when omitted)");
  solve->add_option("--scheme", scheme, "Submodel scheme")->check(CLI::IsMember({"components", "per-node"}));
  solve->add_flag("--canonical", canonical, "Omit timings so reports compare byte for byte");
  std::optional<std::uint64_t> solve_seed;
  solve->add_option("--seed", solve_seed, "Accepted for symmetry; the solve is deterministic");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite;
  std::uint64_t verify_seed = 1;
  std::size_t trials = 0;
  verify->add_option("--suite", suite, "trws-bounds | qpbo-persistency | prop1 | zero-form | kabsch")->required();
  verify->add_option("--seed", verify_seed, "Master seed");
  verify->add_option("--trials", trials, "Trial count (suite default when omitted)");

  auto* bench = app.add_subcommand("bench", "Time serial against OpenMP kernels");
  std::uint64_t bench_seed = 1;
  int reps = 3;
  bench->add_option("--seed", bench_seed, "Scene seed");
  bench->add_option("--trials", reps, "Repetitions per kernel")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(scenario, out, seed);
    if (*solve) return cmd_solve(scene, config, object, report_out, scheme, canonical);
    if (*verify) return cmd_verify(suite, verify_seed, trials);
    if (*bench) return cmd_bench(bench_seed, reps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
