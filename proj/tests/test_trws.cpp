#include <doctest.h>

#include "ghg/oracle.hpp"
#include "ghg/trws.hpp"

using namespace ghg;

TEST_CASE("chain: bound equals the dynamic-programming optimum") {
  // 3-node chain with a unique optimum at (1, 0, 1).
  GraphicalModel m({{1.0, 0.0}, {0.0, 0.5}, {2.0, 0.0}});
  const double diff[4] = {0.0, 1.0, 1.0, 0.0};
  m.add_edge(0, 1, diff);
  m.add_edge(1, 2, diff);
  // Hand enumeration: (1,1,1) = 0 + 0.5 + 0 = 0.5 is the minimum.
  const TrwsResult r = solve_trws(m, {20});
  CHECK(r.lower_bound == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.labeling == Labeling{1, 1, 1});
}

TEST_CASE("sandwich and monotone bound on random sparse models") {
  for (std::uint64_t t = 0; t < 60; ++t) {
    Rng rng(trial_seed(3, t));
    const GraphicalModel m = random_sparse_model(rng, 3 + t % 8, 4);
    const TrwsResult r = solve_trws(m);
    const double opt = brute_force(m).optimal_energy.value();
    for (std::size_t i = 1; i < r.bound_history.size(); ++i)
      CHECK(r.bound_history[i] >= r.bound_history[i - 1] - 1e-9);
    CHECK(r.lower_bound <= opt + 1e-9);
    CHECK(opt <= evaluate_energy(m, r.labeling).value() + 1e-9);
    CHECK(r.bound_history.size() == 10);
  }
}

TEST_CASE("trees: bound reaches the optimum") {
  for (std::uint64_t t = 0; t < 40; ++t) {
    Rng rng(trial_seed(5, t));
    const GraphicalModel m = random_tree_model(rng, 2 + t % 9, 4);
    const TrwsResult r = solve_trws(m, {100});
    const double opt = brute_force(m).optimal_energy.value();
    CHECK(r.lower_bound == doctest::Approx(opt).epsilon(1e-9));
    CHECK(evaluate_energy(m, r.labeling).value() == doctest::Approx(opt).epsilon(1e-9));
  }
}

TEST_CASE("hard constraints leave the only finite labeling") {
  // Node 0 prefers label 1, but label 1 forbids every label of node 1.
  GraphicalModel m({{1.0, 0.0}, {0.0, 5.0}});
  const double t[4] = {0.0, 0.0, kInfinity, kInfinity};
  m.add_edge(0, 1, t);
  const TrwsResult r = solve_trws(m);
  CHECK(r.labeling == Labeling{0, 0});
  CHECK(r.lower_bound == doctest::Approx(1.0));
  GraphicalModel hard_unary({{kInfinity, 0.0}});
  CHECK_THROWS_AS(solve_trws(hard_unary), ContractError);
}

TEST_CASE("extract_inliers uses the last label as outlier") {
  GraphicalModel m({{0, 0, 0}, {0, 0}, {0, 0, 0, 0}});
  CHECK(extract_inliers(m, {2, 0, 1}) == std::vector<NodeId>{1, 2});
  CHECK(extract_inliers(Labeling{3, 1, 3}, 3) == std::vector<NodeId>{1});
}
