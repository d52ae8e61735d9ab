#include "ghg/suites.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "ghg/oracle.hpp"
#include "ghg/pose_fit.hpp"
#include "ghg/qpbo.hpp"
#include "ghg/submodels.hpp"
#include "ghg/trws.hpp"

namespace ghg {

namespace {

constexpr std::size_t kMaxReportedFailures = 10;

/// Runs `trial(i, seed)` for every trial in parallel; a trial returns an
/// error message or nothing.
using Trial = std::function<std::optional<std::string>(std::size_t, std::uint64_t)>;

SuiteReport run_trials(const std::string& name, std::size_t trials, std::uint64_t seed, const Trial& trial) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::optional<std::string>> outcome(trials);
  const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      outcome[k] = trial(k, trial_seed(seed, k));
    } catch (const std::exception& e) {
      outcome[k] = std::string("exception: ") + e.what();
    }
  }
  SuiteReport r;
  r.suite = name;
  r.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    if (!outcome[i]) {
      ++r.passed;
    } else if (r.failures.size() < kMaxReportedFailures) {
      r.failures.push_back("trial " + std::to_string(i) + ": " + *outcome[i]);
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

constexpr double kBoundTol = 1e-9;
constexpr int kSuiteTrwsIterations = 10;
// Tree bounds converge geometrically; exactness is checked after a longer run.
constexpr int kTreeTrwsIterations = 100;

std::optional<std::string> trws_sparse_trial(std::uint64_t seed) {
  Rng rng(seed);
  const GraphicalModel m = random_sparse_model(rng, uniform(rng, 2, 10), 4);
  const TrwsResult t = solve_trws(m, {kSuiteTrwsIterations});
  for (std::size_t i = 1; i < t.bound_history.size(); ++i)
    if (t.bound_history[i] < t.bound_history[i - 1] - kBoundTol)
      return "bound decreased at iteration " + std::to_string(i) + ": " + fmt(t.bound_history[i - 1]) +
             " -> " + fmt(t.bound_history[i]);
  const double opt = brute_force_serial(m, 1).optimal_energy.value();
  const double e = evaluate_energy(m, t.labeling).value();
  if (t.lower_bound > opt + kBoundTol) return "bound " + fmt(t.lower_bound) + " above optimum " + fmt(opt);
  if (opt > e) return "optimum " + fmt(opt) + " above rounded energy " + fmt(e);
  return std::nullopt;
}

std::optional<std::string> trws_tree_trial(std::uint64_t seed) {
  Rng rng(seed);
  const GraphicalModel m = random_tree_model(rng, uniform(rng, 2, 10), 4);
  const TrwsResult t = solve_trws(m, {kTreeTrwsIterations});
  const double opt = brute_force_serial(m, 1).optimal_energy.value();
  if (std::abs(t.lower_bound - opt) > kBoundTol)
    return "tree bound " + fmt(t.lower_bound) + " differs from optimum " + fmt(opt);
  return std::nullopt;
}

std::optional<std::string> qpbo_trial(std::uint64_t seed) {
  Rng rng(seed);
  const GraphicalModel m = random_binary_model(rng, uniform(rng, 1, 14));
  const PartialLabeling p = qpbo(m);
  if (!check_persistency(m, p)) {
    return "labeled nodes disagree with every optimum (" + std::to_string(p.labeled_count()) + " labeled)";
  }
  return std::nullopt;
}

std::optional<std::string> zero_form_trial(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = uniform(rng, 1, 8);
  const GraphicalModel m = random_binary_model(rng, n, 0.6, false);
  const ZeroForm z = to_zero_form(m);
  if (!is_zero_form(z.model)) return "output not in zero form";
  Labeling l(n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    for (std::size_t u = 0; u < n; ++u) l[u] = static_cast<Label>((mask >> u) & 1U);
    const Cost a = evaluate_energy(m, l), b = evaluate_energy(z.model, l);
    const bool same = a.infinite() || b.infinite() ? a == b : std::abs(a.value() - b.value()) <= 1e-12;
    if (!same) return "labeling " + std::to_string(mask) + ": " + fmt(a.value()) + " vs " + fmt(b.value());
  }
  return std::nullopt;
}

std::optional<std::string> kabsch_trial(std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  const Mat3 r0 = q.toRotationMatrix();
  const Vec3 t0(box(rng), box(rng), box(rng));
  std::vector<Correspondence> pairs;
  for (int i = 0; i < 10; ++i) {
    const Vec3 y(box(rng), box(rng), box(rng));
    pairs.push_back({y, r0 * y + t0});
  }
  const Pose p = kabsch(pairs);
  const double re = (p.rotation - r0).norm(), te = (p.translation - t0).norm();
  if (re >= 1e-9 || te >= 1e-9) return "rotation error " + fmt(re) + ", translation error " + fmt(te);
  return std::nullopt;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"trws-bounds", "qpbo-persistency", "prop1", "zero-form",
                                              "kabsch"};
  return names;
}

std::size_t default_trials(const std::string& suite) {
  if (suite == "trws-bounds") return 150;
  if (suite == "qpbo-persistency") return 500;
  if (suite == "prop1") return 200;
  if (suite == "zero-form") return 100;
  if (suite == "kabsch") return 1000;
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

SuiteReport run_suite(const std::string& suite, std::uint64_t seed, std::size_t trials) {
  if (trials == 0) trials = default_trials(suite);
  if (suite == "trws-bounds") {
    // Two thirds sparse graphs, one third trees (100 + 50 by default).
    const std::size_t sparse = trials - trials / 3;
    return run_trials(suite, trials, seed, [sparse](std::size_t i, std::uint64_t s) {
      return i < sparse ? trws_sparse_trial(s) : trws_tree_trial(s);
    });
  }
  if (suite == "qpbo-persistency") {
    return run_trials(suite, trials, seed, [](std::size_t, std::uint64_t s) { return qpbo_trial(s); });
  }
  if (suite == "zero-form") {
    return run_trials(suite, trials, seed, [](std::size_t, std::uint64_t s) { return zero_form_trial(s); });
  }
  if (suite == "kabsch") {
    return run_trials(suite, trials, seed, [](std::size_t, std::uint64_t s) { return kabsch_trial(s); });
  }
  if (suite == "prop1") {
    const auto t0 = std::chrono::steady_clock::now();
    const Prop1Report p = verify_prop1(trials, 1, 12, seed);
    SuiteReport r;
    r.suite = suite;
    r.trials = trials;
    r.passed = p.passed();
    for (std::size_t i = 0; i < p.trials.size() && r.failures.size() < kMaxReportedFailures; ++i) {
      if (!p.trials[i].passed) {
        r.failures.push_back("trial " + std::to_string(i) + ": master optimum " +
                             fmt(p.trials[i].master_optimum) + ", extension " +
                             fmt(p.trials[i].extended_energy));
      }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace ghg
