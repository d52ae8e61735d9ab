#include <doctest.h>

#include "ghg/graphical_model.hpp"
#include "ghg/oracle.hpp"

using namespace ghg;

namespace {

GraphicalModel two_node_model() {
  GraphicalModel m({{1.0, 2.0}, {0.5, 0.0, 3.0}}, 2.0);
  const double t[6] = {0.0, 1.0, 2.0, 4.0, 0.25, kInfinity};
  m.add_edge(0, 1, t);
  m.set_constant(0.125);
  return m;
}

}  // namespace

TEST_CASE("energy is unary plus weighted pairwise plus constant") {
  const GraphicalModel m = two_node_model();
  CHECK(evaluate_energy(m, {0, 0}).value() == doctest::Approx(1.0 + 0.5 + 0.0 + 0.125));
  CHECK(evaluate_energy(m, {1, 1}).value() == doctest::Approx(2.0 + 0.0 + 2.0 * 0.25 + 0.125));
  CHECK(evaluate_energy(m, {0, 2}).value() == doctest::Approx(1.0 + 3.0 + 2.0 * 2.0 + 0.125));
  CHECK(evaluate_energy(m, {1, 2}).infinite());
}

TEST_CASE("edges added in reverse orientation are stored transposed") {
  GraphicalModel a({{0.0, 0.0}, {0.0, 0.0, 0.0}});
  const double t_ab[6] = {1, 2, 3, 4, 5, 6};  // [l0 * 3 + l1]
  a.add_edge(0, 1, t_ab);
  GraphicalModel b({{0.0, 0.0}, {0.0, 0.0, 0.0}});
  const double t_ba[6] = {1, 4, 2, 5, 3, 6};  // [l1 * 2 + l0]
  b.add_edge(1, 0, t_ba);
  for (Label x = 0; x < 2; ++x)
    for (Label y = 0; y < 3; ++y) {
      CHECK(a.pairwise(0, x, y) == b.pairwise(0, x, y));
      CHECK(a.pairwise_oriented(0, 1, y, x) == a.pairwise(0, x, y));
    }
  CHECK(b.edge(0).u == 0);
  CHECK(b.edge(0).v == 1);
}

TEST_CASE("duplicate edges and self loops are rejected") {
  GraphicalModel m({{0.0, 0.0}, {0.0, 0.0}});
  const double t[4] = {0, 0, 0, 0};
  m.add_edge(0, 1, t);
  CHECK_THROWS_AS(m.add_edge(1, 0, t), ContractError);
  CHECK_THROWS_AS(m.add_edge(0, 0, t), ContractError);
}

TEST_CASE("NaN and -inf costs are rejected") {
  GraphicalModel m({{0.0, 0.0}, {0.0, 0.0}});
  CHECK_THROWS_AS(m.set_unary(0, 0, -kInfinity), ContractError);
  CHECK_THROWS_AS(m.set_unary(0, 0, std::nan("")), ContractError);
}

TEST_CASE("infinite costs survive addition but not subtraction") {
  const Cost inf = Cost::infinity();
  CHECK((inf + Cost(3.0)).infinite());
  CHECK((2.0 * inf).infinite());
  CHECK_THROWS_AS(inf - Cost(1.0), ContractError);
  CHECK((Cost(3.0) - Cost(1.0)).value() == 2.0);
}

TEST_CASE("memoized lazy edges match the callback, serial and parallel") {
  Rng rng(7);
  std::vector<std::vector<double>> unaries(30, std::vector<double>(3, 0.0));
  GraphicalModel lazy(unaries, 1.5);
  for (NodeId u = 0; u + 1 < 30; ++u) lazy.add_lazy_edge(u, u + 1);
  for (NodeId u = 0; u + 5 < 30; u += 3) lazy.add_lazy_edge(u, u + 5);
  lazy.set_lazy_pairwise([](std::size_t e, Label a, Label b) {
    return static_cast<double>((e * 7 + a * 3 + b) % 11) / 4.0;
  });
  GraphicalModel par = lazy, ser = lazy;
  par.memoize_pairwise();
  ser.memoize_pairwise_serial();
  for (std::size_t e = 0; e < lazy.edge_count(); ++e) {
    CHECK(par.is_materialized(e));
    for (Label a = 0; a < 3; ++a)
      for (Label b = 0; b < 3; ++b) {
        CHECK(par.pairwise(e, a, b) == lazy.pairwise(e, a, b));
        CHECK(ser.pairwise(e, a, b) == lazy.pairwise(e, a, b));
      }
  }
}

TEST_CASE("induced submodel keeps internal edges and extends with a fill label") {
  GraphicalModel m({{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const double t[4] = {0, 0, 0, 5};
  m.add_edge(0, 1, t);
  m.add_edge(1, 3, t);
  m.add_edge(2, 3, t);
  const InducedSubmodel sub = induce_submodel(m, {3, 1});
  REQUIRE(sub.node_map == std::vector<NodeId>{1, 3});
  CHECK(sub.model.node_count() == 2);
  CHECK(sub.model.edge_count() == 1);
  CHECK(sub.model.unary(1, 1) == 4.0);
  PartialLabeling p(2);
  p[0] = 1;
  const PartialLabeling ext = extend_partial(4, p, sub.node_map, 0);
  CHECK(ext[0] == Label{0});
  CHECK(ext[1] == Label{1});
  CHECK(ext[2] == Label{0});
  CHECK(!ext[3].has_value());
}

TEST_CASE("brute force: parallel equals serial, optima in lexicographic order") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const GraphicalModel m = random_sparse_model(rng, 7, 3);
    const OracleResult a = brute_force(m);
    const OracleResult b = brute_force_serial(m);
    CHECK(a.optimal_energy == b.optimal_energy);
    CHECK(a.optima == b.optima);
    CHECK(std::is_sorted(a.optima.begin(), a.optima.end()));
    for (const Labeling& l : a.optima) CHECK(evaluate_energy(m, l) == a.optimal_energy);
  }
}

TEST_CASE("brute force refuses oversized models") {
  GraphicalModel m(std::vector<std::vector<double>>(30, std::vector<double>(2, 0.0)));
  CHECK_THROWS_AS(brute_force(m), ContractError);
}

TEST_CASE("per-trial seeds are distinct and reproducible") {
  CHECK(trial_seed(1, 0) == trial_seed(1, 0));
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}
