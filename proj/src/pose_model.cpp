#include "ghg/pose_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <tuple>

namespace ghg {

void SceneObservation::validate() const {
  if (grid_width < 1 || grid_height < 1) throw ContractError("scene: grid dimensions must be >= 1");
  if (nodes.size() != static_cast<std::size_t>(grid_width) * static_cast<std::size_t>(grid_height)) {
    throw ContractError("scene: node count does not match grid");
  }
  if (!(diameter > 0.0) || !std::isfinite(diameter)) throw ContractError("scene: diameter must be > 0");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const SceneNode& n = nodes[i];
    if (!n.point.allFinite()) throw ContractError("scene: non-finite point at node " + std::to_string(i));
    if (n.candidates.size() > kMaxCandidatesPerNode) {
      throw ContractError("scene: node " + std::to_string(i) + " has more than 12 candidates");
    }
    for (const Candidate& c : n.candidates) {
      if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
        throw ContractError("scene: confidence outside [0,1] at node " + std::to_string(i));
      }
      if (!c.object_coord.allFinite()) throw ContractError("scene: non-finite object coordinate");
      if (c.source_pixel < 0 || c.source_pixel > 3 || c.source_tree < 0 || c.source_tree > 2) {
        throw ContractError("scene: candidate pixel/tree out of range at node " + std::to_string(i));
      }
    }
  }
}

void HyperParams::validate() const {
  if (!(alpha > 0.0) || !(beta >= 0.0) || !(gamma >= 0.0) || !std::isfinite(alpha) ||
      !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw ContractError("hyper-parameters: need alpha > 0, beta >= 0, gamma >= 0");
  }
}

double pairwise_cost(const Vec3& lu, const Vec3& lv, const Vec3& xu, const Vec3& xv,
                     double diameter) {
  const double scene_dist = (xu - xv).norm();
  if (scene_dist > diameter) return kInfinity;
  return std::abs((lu - lv).norm() - scene_dist);
}

std::vector<Edge> build_sparse_neighborhood(int grid_width, int grid_height) {
  if (grid_width < 1 || grid_height < 1) {
    throw ContractError("build_sparse_neighborhood: grid dimensions must be >= 1");
  }
  constexpr int kSkip = 8;
  constexpr int kKeep = 48;
  constexpr int kReach = 8;
  // (squared distance, dy, dx): lexicographic order on (dy, dx) is the
  // row-major index order of neighbours at equal distance.
  std::vector<std::array<int, 3>> offsets;
  for (int dy = -kReach; dy <= kReach; ++dy)
    for (int dx = -kReach; dx <= kReach; ++dx)
      if (dx != 0 || dy != 0) offsets.push_back({dx * dx + dy * dy, dy, dx});
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(offsets.begin(), offsets.begin() + kSkip);
  offsets.resize(kKeep);

  std::vector<Edge> edges;
  for (int y = 0; y < grid_height; ++y)
    for (int x = 0; x < grid_width; ++x) {
      const auto u = static_cast<NodeId>(y * grid_width + x);
      for (const auto& o : offsets) {
        const int nx = x + o[2];
        const int ny = y + o[1];
        if (nx < 0 || ny < 0 || nx >= grid_width || ny >= grid_height) continue;
        const auto v = static_cast<NodeId>(ny * grid_width + nx);
        if (v > u) edges.push_back({u, v});
      }
    }
  return edges;
}

double inlier_unary(double confidence, double alpha) { return (1.0 - confidence) * alpha; }

double outlier_unary(const SceneNode& node, double alpha) {
  double sum = 0.0;
  for (const Candidate& c : node.candidates) sum += c.confidence;
  return sum * alpha / static_cast<double>(kMaxCandidatesPerNode);
}

namespace {

struct StageOneData {
  std::vector<Edge> edges;
  std::vector<Vec3> points;
  std::vector<std::vector<Vec3>> coords;
  double diameter;
  double gamma;
};

}  // namespace

GraphicalModel build_stage_one_model(const SceneObservation& scene, const HyperParams& hp) {
  scene.validate();
  hp.validate();
  std::vector<std::vector<double>> unaries(scene.node_count());
  auto data = std::make_shared<StageOneData>();
  data->points.reserve(scene.node_count());
  data->coords.resize(scene.node_count());
  data->diameter = scene.diameter;
  data->gamma = hp.gamma;
  for (std::size_t i = 0; i < scene.node_count(); ++i) {
    const SceneNode& n = scene.nodes[i];
    for (const Candidate& c : n.candidates) {
      unaries[i].push_back(inlier_unary(c.confidence, hp.alpha));
      data->coords[i].push_back(c.object_coord);
    }
    unaries[i].push_back(outlier_unary(n, hp.alpha));
    data->points.push_back(n.point);
  }
  data->edges = build_sparse_neighborhood(scene.grid_width, scene.grid_height);

  GraphicalModel model(unaries, hp.beta);
  for (const Edge& e : data->edges) model.add_lazy_edge(e.u, e.v);
  model.set_lazy_pairwise([data](std::size_t e, Label lu, Label lv) -> double {
    const Edge& ed = data->edges[e];
    const bool out_u = lu == data->coords[ed.u].size();
    const bool out_v = lv == data->coords[ed.v].size();
    if (out_u && out_v) return 0.0;
    if (out_u || out_v) return data->gamma;
    return pairwise_cost(data->coords[ed.u][lu], data->coords[ed.v][lv], data->points[ed.u],
                         data->points[ed.v], data->diameter);
  });
  return model;
}

GraphicalModel build_stage_two_master(const SceneObservation& scene, const HyperParams& hp,
                                      const std::vector<NodeId>& inliers,
                                      const Labeling& stage_one_labels) {
  hp.validate();
  if (inliers.empty()) throw ContractError("build_stage_two_master: no inliers");
  if (stage_one_labels.size() != scene.node_count()) {
    throw ContractError("build_stage_two_master: stage-one labeling size mismatch");
  }
  if (!std::is_sorted(inliers.begin(), inliers.end()) ||
      std::adjacent_find(inliers.begin(), inliers.end()) != inliers.end()) {
    throw ContractError("build_stage_two_master: inliers must be sorted and unique");
  }
  const std::size_t n = inliers.size();
  std::vector<std::vector<double>> unaries(n);
  std::vector<const Candidate*> chosen(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId s = inliers[i];
    if (s >= scene.node_count()) throw ContractError("build_stage_two_master: inlier out of range");
    const SceneNode& node = scene.nodes[s];
    const Label l = stage_one_labels[s];
    if (l >= node.candidates.size()) {
      throw ContractError("build_stage_two_master: inlier node " + std::to_string(s) +
                          " carries the outlier label");
    }
    chosen[i] = &node.candidates[l];
    unaries[i] = {outlier_unary(node, hp.alpha), inlier_unary(chosen[i]->confidence, hp.alpha)};
  }
  GraphicalModel model(unaries, hp.beta);
  std::array<double, 4> table{0.0, hp.gamma, hp.gamma, 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      table[3] = pairwise_cost(chosen[i]->object_coord, chosen[j]->object_coord,
                               scene.nodes[inliers[i]].point, scene.nodes[inliers[j]].point,
                               scene.diameter);
      model.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j), table);
    }
  return model;
}

namespace {

PoseConsistentPixel make_pixel(const SceneObservation& scene, NodeId u, const Candidate& c) {
  const int col = static_cast<int>(u) % scene.grid_width;
  const int row = static_cast<int>(u) / scene.grid_width;
  return {u, 2 * col + c.source_pixel % 2, 2 * row + c.source_pixel / 2, c.object_coord,
          scene.nodes[u].point};
}

}  // namespace

std::vector<PoseConsistentPixel> pose_consistent_pixels(const SceneObservation& scene,
                                                        const Labeling& labeling) {
  if (labeling.size() != scene.node_count()) {
    throw ContractError("pose_consistent_pixels: labeling size mismatch");
  }
  std::vector<PoseConsistentPixel> out;
  for (NodeId u = 0; u < labeling.size(); ++u) {
    const auto& cands = scene.nodes[u].candidates;
    if (labeling[u] > cands.size()) throw ContractError("pose_consistent_pixels: label out of range");
    if (labeling[u] == cands.size()) continue;
    out.push_back(make_pixel(scene, u, cands[labeling[u]]));
  }
  return out;
}

std::vector<PoseConsistentPixel> pose_consistent_pixels(const SceneObservation& scene,
                                                        const std::vector<NodeId>& master_nodes,
                                                        const Labeling& stage_one_labels,
                                                        const PartialLabeling& binary) {
  if (binary.size() != master_nodes.size()) {
    throw ContractError("pose_consistent_pixels: binary labeling size mismatch");
  }
  std::vector<PoseConsistentPixel> out;
  for (std::size_t i = 0; i < master_nodes.size(); ++i) {
    if (!binary[i] || *binary[i] != 1) continue;
    const NodeId u = master_nodes[i];
    const auto& cands = scene.nodes[u].candidates;
    const Label l = stage_one_labels.at(u);
    if (l >= cands.size()) throw ContractError("pose_consistent_pixels: node has no candidate");
    out.push_back(make_pixel(scene, u, cands[l]));
  }
  return out;
}

}  // namespace ghg
