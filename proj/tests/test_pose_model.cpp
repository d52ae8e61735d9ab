#include <doctest.h>

#include <algorithm>
#include <set>
#include <utility>

#include "ghg/pose_model.hpp"

using namespace ghg;

namespace {

SceneObservation tiny_scene() {
  SceneObservation s;
  // Immediate grid neighbours share no edge, so the interesting nodes are
  // 0, 2 and 4; nodes 1 and 3 are filler.
  s.grid_width = 5;
  s.grid_height = 1;
  s.diameter = 1.0;
  s.nodes.resize(5);
  s.nodes[0].point = Vec3(0, 0, 1);
  s.nodes[1].point = Vec3(0.1, 0, 1);
  s.nodes[2].point = Vec3(0.5, 0, 1);
  s.nodes[3].point = Vec3(0.2, 0, 1);
  s.nodes[4].point = Vec3(2.0, 0, 1);
  s.nodes[0].candidates = {{Vec3(0, 0, 0), 0.5, 0, 0}, {Vec3(1, 0, 0), 0.25, 1, 0}};
  s.nodes[1].candidates = {{Vec3(0, 0, 0), 0.5, 0, 0}};
  s.nodes[2].candidates = {{Vec3(0.25, 0, 0), 1.0, 0, 1}};
  s.nodes[3].candidates = {{Vec3(0, 0, 0), 0.5, 0, 0}};
  s.nodes[4].candidates = {{Vec3(0, 0, 0), 0.0, 3, 2}};
  return s;
}

}  // namespace

TEST_CASE("pairwise cost compares object and scene distances") {
  const Vec3 o(0, 0, 0);
  CHECK(pairwise_cost(o, Vec3(0.3, 0, 0), o, Vec3(0, 0.5, 0), 1.0) == doctest::Approx(0.2));
  CHECK(pairwise_cost(o, Vec3(0.5, 0, 0), o, Vec3(0, 0.5, 0), 1.0) == 0.0);
  CHECK(pairwise_cost(o, o, o, Vec3(0, 0, 1.0), 1.0) == 1.0);  // at the diameter: finite
  CHECK(pairwise_cost(o, o, o, Vec3(0, 0, 1.5), 1.0) == kInfinity);
}

TEST_CASE("unaries") {
  CHECK(inlier_unary(0.75, 0.2) == doctest::Approx(0.05));
  SceneNode n;
  n.candidates = {{Vec3::Zero(), 0.5, 0, 0}, {Vec3::Zero(), 0.25, 0, 1}};
  CHECK(outlier_unary(n, 0.24) == doctest::Approx(0.75 * 0.24 / 12.0));
}

TEST_CASE("sparse neighbourhood skips the nearest 8 and keeps the next 48") {
  const int w = 21, h = 19;
  const auto edges = build_sparse_neighborhood(w, h);
  std::set<std::pair<NodeId, NodeId>> have;
  for (const Edge& e : edges) {
    CHECK(e.u < e.v);
    CHECK(have.insert({e.u, e.v}).second);
  }
  // Independent rank computation for an interior node: sort every other
  // node by (squared distance, row-major index) and take ranks 9..56.
  const int cx = 10, cy = 9;
  const NodeId c = static_cast<NodeId>(cy * w + cx);
  std::vector<std::pair<int, NodeId>> order;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const NodeId v = static_cast<NodeId>(y * w + x);
      if (v != c) order.push_back({(x - cx) * (x - cx) + (y - cy) * (y - cy), v});
    }
  std::sort(order.begin(), order.end());
  std::set<NodeId> expected;
  for (std::size_t r = 8; r < 56; ++r) expected.insert(order[r].second);
  std::set<NodeId> got;
  for (const Edge& e : edges) {
    if (e.u == c) got.insert(e.v);
    if (e.v == c) got.insert(e.u);
  }
  CHECK(got == expected);
}

TEST_CASE("stage one model: outlier label last, lazy pairwise costs") {
  const SceneObservation s = tiny_scene();
  const HyperParams hp{0.3, 2.0, 0.01};
  const GraphicalModel m = build_stage_one_model(s, hp);
  REQUIRE(m.node_count() == 5);
  CHECK(!m.find_edge(0, 1).has_value());
  CHECK(m.label_count(0) == 3);
  CHECK(m.pairwise_weight() == 2.0);
  CHECK(m.unary(0, 0) == doctest::Approx(0.5 * 0.3));
  CHECK(m.unary(0, 2) == doctest::Approx(0.75 * 0.3 / 12.0));
  const auto e01 = m.find_edge(0, 2);
  const auto e02 = m.find_edge(0, 4);
  REQUIRE(e01.has_value());
  REQUIRE(e02.has_value());
  CHECK(m.pairwise(*e01, 0, 0) == doctest::Approx(0.25));   // |0.25 - 0.5|
  CHECK(m.pairwise(*e01, 1, 0) == doctest::Approx(0.25));   // |0.75 - 0.5|
  CHECK(m.pairwise(*e01, 2, 0) == 0.01);
  CHECK(m.pairwise(*e01, 2, 1) == 0.0);
  CHECK(m.pairwise(*e02, 0, 0) == kInfinity);
  CHECK(outlier_label(s, 2) == 1);
}

TEST_CASE("stage two master is complete and binary") {
  const SceneObservation s = tiny_scene();
  const HyperParams hp{0.2, 1.0, 0.05};
  const GraphicalModel m = build_stage_two_master(s, hp, {0, 2, 4}, {1, 0, 0, 0, 0});
  CHECK(m.node_count() == 3);
  CHECK(m.edge_count() == 3);
  CHECK(m.unary(0, 1) == doctest::Approx(0.75 * 0.2));
  CHECK(m.pairwise(0, 0, 1) == 0.05);
  CHECK(m.pairwise(0, 1, 1) == doctest::Approx(0.25));  // |0.75 - 0.5|
  CHECK(m.pairwise(*m.find_edge(0, 2), 1, 1) == kInfinity);
  CHECK_THROWS_AS(build_stage_two_master(s, hp, {0, 2}, {2, 0, 0, 0, 0}), ContractError);
  CHECK_THROWS_AS(build_stage_two_master(s, hp, {2, 0}, {0, 0, 0, 0, 0}), ContractError);
}

TEST_CASE("pose-consistent pixels carry the source pixel") {
  const SceneObservation s = tiny_scene();
  const auto px = pose_consistent_pixels(s, Labeling{1, 1, 1, 1, 0});
  REQUIRE(px.size() == 2);
  CHECK(px[0].node == 0);
  CHECK(px[0].pixel_col == 1);
  CHECK(px[0].pixel_row == 0);
  CHECK(px[1].node == 4);
  CHECK(px[1].pixel_col == 9);
  CHECK(px[1].pixel_row == 1);
}

TEST_CASE("hyper-parameter validation") {
  CHECK_THROWS_AS((HyperParams{0.0, 1.0, 0.0}.validate()), ContractError);
  CHECK_THROWS_AS((HyperParams{0.1, -1.0, 0.0}.validate()), ContractError);
  CHECK_NOTHROW(HyperParams::stage_one().validate());
}
