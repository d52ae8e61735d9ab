#include <doctest.h>

#include <algorithm>

#include "ghg/maxflow.hpp"
#include "ghg/oracle.hpp"
#include "ghg/qpbo.hpp"
#include "ghg/submodels.hpp"

using namespace ghg;

namespace {

FlowNetwork random_network(Rng& rng, std::size_t n) {
  FlowNetwork net;
  net.node_count = n;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && rng() % 3 == 0) net.arcs.push_back({a, b, dyadic(rng, 0, 128)});
  return net;
}

// Minimum over all s-t cuts by enumerating the sides of the inner nodes.
double brute_min_cut(const FlowNetwork& net) {
  const std::size_t inner = net.node_count - 2;
  double best = kInfinity;
  for (std::uint64_t mask = 0; mask < (1ULL << inner); ++mask) {
    std::vector<bool> side(net.node_count, false);
    side[net.source] = true;
    for (std::size_t i = 0; i < inner; ++i) side[2 + i] = (mask >> i) & 1;
    best = std::min(best, cut_capacity(net, side));
  }
  return best;
}

}  // namespace

TEST_CASE("max flow equals the brute-force minimum cut") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(trial_seed(17, t));
    const FlowNetwork net = random_network(rng, 2 + t % 9);
    const MaxFlowResult r = max_flow(net);
    const double cut = brute_min_cut(net);
    CHECK(r.flow_value == doctest::Approx(cut).epsilon(1e-12));
    CHECK(cut_capacity(net, r.source_side) == doctest::Approx(cut).epsilon(1e-12));
    CHECK(r.source_side[net.source]);
    CHECK(!r.source_side[net.sink]);
  }
}

TEST_CASE("max flow respects capacities and conservation") {
  Rng rng(23);
  const FlowNetwork net = random_network(rng, 12);
  const MaxFlowResult r = max_flow(net);
  std::vector<double> balance(net.node_count, 0.0);
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    CHECK(r.arc_flow[k] >= -1e-12);
    CHECK(r.arc_flow[k] <= net.arcs[k].capacity + 1e-12);
    balance[net.arcs[k].from] -= r.arc_flow[k];
    balance[net.arcs[k].to] += r.arc_flow[k];
  }
  for (std::size_t x = 2; x < net.node_count; ++x) CHECK(balance[x] == doctest::Approx(0.0));
  CHECK(balance[net.sink] == doctest::Approx(r.flow_value));
}

TEST_CASE("max flow rejects infinite capacities") {
  FlowNetwork net;
  net.node_count = 2;
  net.arcs.push_back({0, 1, kInfinity});
  CHECK_THROWS_AS(max_flow(net), ContractError);
}

TEST_CASE("qpbo labels every node of a submodular model optimally") {
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng(trial_seed(29, t));
    const std::size_t n = 2 + t % 9;
    std::vector<std::vector<double>> u(n);
    for (auto& row : u) row = {dyadic(rng, 0, 64), dyadic(rng, 0, 64)};
    GraphicalModel m(u, 1.0);
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b) {
        if (rng() % 2) continue;
        const double w = dyadic(rng, 1, 64);
        const double table[4] = {0.0, w, w, 0.0};
        m.add_edge(a, b, table);
      }
    const PartialLabeling p = qpbo(m);
    const OracleResult oracle = brute_force(m);
    if (oracle.optima.size() == 1) {
      REQUIRE(p.labeled_count() == n);
      Labeling l(n);
      for (std::size_t i = 0; i < n; ++i) l[i] = *p[i];
      CHECK(evaluate_energy(m, l) == oracle.optimal_energy);
    }
    CHECK(check_persistency(m, p, oracle));
  }
}

TEST_CASE("qpbo labels are persistent on mixed models") {
  for (std::uint64_t t = 0; t < 300; ++t) {
    Rng rng(trial_seed(31, t));
    const GraphicalModel m = random_binary_model(rng, 2 + t % 11);
    const PartialLabeling p = qpbo(m);
    CHECK(check_persistency(m, p));
  }
}

TEST_CASE("qpbo requires binary models") {
  GraphicalModel m({{0.0, 0.0, 0.0}});
  CHECK_THROWS_AS(qpbo(m), ContractError);
}

TEST_CASE("zero form of a single edge") {
  GraphicalModel m({{0.5, 0.25}, {0.0, 1.0}}, 2.0);
  const double t[4] = {1.0, 2.0, 3.0, 5.0};  // (0,0) (0,1) (1,0) (1,1)
  m.add_edge(0, 1, t);
  const ZeroForm z = to_zero_form(m);
  CHECK(is_zero_form(z.model));
  CHECK(z.shift == 2.0);
  CHECK(z.model.unary(0, 0) == 0.5);
  CHECK(z.model.unary(0, 1) == 0.25 + 2.0 * (3.0 - 1.0));
  CHECK(z.model.unary(1, 0) == 0.0);
  CHECK(z.model.unary(1, 1) == 1.0 + 2.0 * (2.0 - 1.0));
  CHECK(z.model.pairwise(0, 1, 1) == 1.0 + 5.0 - 2.0 - 3.0);
  for (Label a = 0; a < 2; ++a)
    for (Label b = 0; b < 2; ++b)
      CHECK(evaluate_energy(z.model, {a, b}) == evaluate_energy(m, {a, b}));
}

TEST_CASE("zero form keeps infinite (1,1) entries and rejects others") {
  GraphicalModel m({{0.0, 0.0}, {0.0, 0.0}});
  const double ok[4] = {0.0, 1.0, 1.0, kInfinity};
  m.add_edge(0, 1, ok);
  CHECK(to_zero_form(m).model.pairwise(0, 1, 1) == kInfinity);
  GraphicalModel bad({{0.0, 0.0}, {0.0, 0.0}});
  const double t[4] = {0.0, kInfinity, 1.0, 1.0};
  bad.add_edge(0, 1, t);
  CHECK_THROWS_AS(to_zero_form(bad), ContractError);
}

TEST_CASE("zero form preserves every energy") {
  for (std::uint64_t t = 0; t < 40; ++t) {
    Rng rng(trial_seed(37, t));
    const std::size_t n = 1 + t % 8;
    const GraphicalModel m = random_binary_model(rng, n, 0.6, false);
    const ZeroForm z = to_zero_form(m);
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      Labeling l(n);
      for (std::size_t i = 0; i < n; ++i) l[i] = (mask >> i) & 1;
      const Cost a = evaluate_energy(m, l), b = evaluate_energy(z.model, l);
      if (a.infinite()) {
        CHECK(b.infinite());
      } else {
        CHECK(std::abs(a.value() - b.value()) <= 1e-12);
      }
    }
  }
}
