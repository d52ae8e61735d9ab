#include <doctest.h>

#include <algorithm>
#include <functional>

#include "ghg/oracle.hpp"
#include "ghg/submodels.hpp"

using namespace ghg;

namespace {

// Union-find labelling of the 8-connected inlier mask, independent of the
// breadth-first search under test.
std::vector<std::vector<NodeId>> union_find_components(const std::vector<NodeId>& inliers, int w,
                                                       int h) {
  std::vector<int> parent(static_cast<std::size_t>(w * h), -1);
  for (NodeId u : inliers) parent[u] = static_cast<int>(u);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (NodeId u : inliers) {
    const int x = static_cast<int>(u) % w, y = static_cast<int>(u) / w;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int v = ny * w + nx;
        if (parent[v] < 0) continue;
        parent[find(v)] = find(static_cast<int>(u));
      }
  }
  std::vector<std::vector<NodeId>> groups;
  std::vector<int> group_of(parent.size(), -1);
  for (std::size_t c = 0; c < parent.size(); ++c) {
    if (parent[c] < 0) continue;
    const int r = find(static_cast<int>(c));
    if (group_of[r] < 0) {
      group_of[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of[r]].push_back(static_cast<NodeId>(c));
  }
  return groups;
}

SceneObservation line_scene(const std::vector<double>& xs, double diameter) {
  SceneObservation s;
  s.grid_width = static_cast<int>(xs.size());
  s.grid_height = 1;
  s.diameter = diameter;
  for (double x : xs) {
    SceneNode n;
    n.point = Vec3(x, 0, 1);
    n.candidates = {{Vec3::Zero(), 0.5, 0, 0}};
    s.nodes.push_back(n);
  }
  return s;
}

}  // namespace

TEST_CASE("connected components match an independent union-find") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(trial_seed(41, t));
    const int w = 3 + static_cast<int>(rng() % 12), h = 2 + static_cast<int>(rng() % 10);
    std::vector<NodeId> inliers;
    for (int c = 0; c < w * h; ++c)
      if (rng() % 100 < 35) inliers.push_back(static_cast<NodeId>(c));
    const auto comps = connected_components(inliers, w, h);
    const auto expected = union_find_components(inliers, w, h);
    REQUIRE(comps.size() == expected.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
      CHECK(comps[i].serial == i);
      CHECK(comps[i].nodes == expected[i]);  // both ordered by smallest node
    }
  }
}

TEST_CASE("diagonal contact joins components") {
  // 3x3 grid, inliers on the main diagonal and one isolated corner.
  const auto comps = connected_components({0, 4, 8, 2}, 3, 3);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].nodes == std::vector<NodeId>{0, 2, 4, 8});
  CHECK(connected_components({0, 2}, 3, 1).size() == 2);
}

TEST_CASE("small components are dropped and the rest renumbered") {
  const auto comps = filter_components(connected_components({0, 1, 2, 5, 8, 9, 10, 11}, 12, 1), 3);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].serial == 0);
  CHECK(comps[1].serial == 1);
  CHECK(comps[1].nodes == std::vector<NodeId>{8, 9, 10, 11});
}

TEST_CASE("enumeration joins later components within the diameter") {
  // Components {0,1} at x~0, {3,4} at x~0.5, {6,7} at x~1.2, D = 1.
  const SceneObservation s = line_scene({0.0, 0.05, 9, 0.5, 0.55, 9, 1.2, 1.25}, 1.0);
  const auto comps = connected_components({0, 1, 3, 4, 6, 7}, 8, 1);
  REQUIRE(comps.size() == 3);
  const auto specs = enumerate_submodels(comps, s);
  REQUIRE(specs.size() == 3);
  CHECK(specs[0].member_components == std::vector<std::size_t>{0, 1});
  CHECK(specs[0].node_set == std::vector<NodeId>{0, 1, 3, 4});
  CHECK(specs[1].member_components == std::vector<std::size_t>{1, 2});
  CHECK(specs[1].node_set == std::vector<NodeId>{3, 4, 6, 7});
  CHECK(specs[2].member_components == std::vector<std::size_t>{2});
  // Earlier components are never revisited by later seeds.
  CHECK(std::find(specs[2].member_components.begin(), specs[2].member_components.end(), 1) ==
        specs[2].member_components.end());
}

TEST_CASE("per-node scheme gathers inliers within the diameter") {
  const SceneObservation s = line_scene({0.0, 0.6, 1.1, 3.0}, 1.0);
  const auto specs = enumerate_per_node_submodels({0, 1, 2, 3}, s);
  REQUIRE(specs.size() == 4);
  CHECK(specs[0].node_set == std::vector<NodeId>{0, 1});
  CHECK(specs[1].node_set == std::vector<NodeId>{0, 1, 2});
  CHECK(specs[3].node_set == std::vector<NodeId>{3});
  CHECK(drop_small_specs(specs, 3).size() == 1);
}

TEST_CASE("remap to master indices") {
  SubmodelSpec spec;
  spec.node_set = {4, 9, 17};
  CHECK(remap_to_master(spec, {1, 4, 9, 12, 17}).node_set == std::vector<NodeId>{1, 2, 4});
  spec.node_set = {5};
  CHECK_THROWS_AS(remap_to_master(spec, {1, 4}), ContractError);
}

TEST_CASE("decomposed solve: parallel equals serial and needs zero form") {
  Rng rng(43);
  const GraphicalModel master = random_zero_form_model(rng, 40, 0.3);
  std::vector<SubmodelSpec> specs;
  for (int k = 0; k < 12; ++k) {
    SubmodelSpec s;
    for (NodeId u = 0; u < 40; ++u)
      if (rng() % 4 == 0) s.node_set.push_back(u);
    specs.push_back(s);
  }
  const auto a = solve_decomposed(master, specs);
  const auto b = solve_decomposed_serial(master, specs);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].spec_index == i);
    CHECK(a[i].labeling == b[i].labeling);
    CHECK(a[i].submodel_nodes == specs[i].node_set.size());
    // Nodes outside the spec carry 0.
    for (NodeId u = 0; u < 40; ++u)
      if (!std::binary_search(specs[i].node_set.begin(), specs[i].node_set.end(), u))
        CHECK(a[i].labeling[u] == Label{0});
  }
  GraphicalModel not_zero({{0.0, 0.0}, {0.0, 0.0}});
  const double t[4] = {1.0, 0.0, 0.0, 0.0};
  not_zero.add_edge(0, 1, t);
  CHECK_THROWS_AS(solve_decomposed(not_zero, specs), ContractError);
}

TEST_CASE("submodel optima extend to master optima") {
  const Prop1Report r = verify_prop1(60, 2, 10, 47);
  CHECK(r.passed() == 60);
}
