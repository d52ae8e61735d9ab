#pragma once

#include <cstddef>
#include <vector>

#include "ghg/geometry.hpp"
#include "ghg/graphical_model.hpp"

namespace ghg {

inline constexpr std::size_t kMaxCandidatesPerNode = 12;  // 2x2 pixels x 3 trees

/// One object-coordinate prediction for a node.
struct Candidate {
  Vec3 object_coord = Vec3::Zero();  // meters, object frame
  double confidence = 0.0;           // object probability p in [0,1]
  int source_pixel = 0;              // 0..3 inside the 2x2 block, row-major
  int source_tree = 0;               // 0..2
};

struct SceneNode {
  Vec3 point = Vec3::Zero();  // camera-space point, meters
  std::vector<Candidate> candidates;
};

/// Node grid of a downscaled RGB-D frame: each node aggregates 2x2 pixels.
struct SceneObservation {
  int grid_width = 0;
  int grid_height = 0;
  double diameter = 0.0;  // object diameter D, meters
  std::vector<SceneNode> nodes;  // row-major

  std::size_t node_count() const { return nodes.size(); }
  NodeId node_at(int col, int row) const { return static_cast<NodeId>(row * grid_width + col); }
  /// Throws ContractError when the observation breaks its invariants.
  void validate() const;
};

struct HyperParams {
  double alpha = 0.21;
  double beta = 23.1;
  double gamma = 0.0048;

  static HyperParams stage_one() { return {0.21, 23.1, 0.0048}; }
  static HyperParams stage_two() { return {0.2, 2.0, 0.0}; }
  void validate() const;
};

/// | |l_u - l_v| - |x_u - x_v| | when |x_u - x_v| <= D, infinity otherwise.
double pairwise_cost(const Vec3& lu, const Vec3& lv, const Vec3& xu, const Vec3& xv,
                     double diameter);

/// Sparse stage-one neighbourhood: each node is joined to its 9th..56th
/// nearest grid nodes (ties by row-major index). Edges are returned once
/// with u < v in row-major order of u.
std::vector<Edge> build_sparse_neighborhood(int grid_width, int grid_height);

/// Unary cost of an inlier candidate: (1 - p) * alpha.
double inlier_unary(double confidence, double alpha);
/// Unary cost of the outlier label: sum of candidate confidences * alpha / 12.
double outlier_unary(const SceneNode& node, double alpha);

/// Multi-label stage-one model. Node u has labels 0..k-1 for its k
/// candidates plus the outlier label k (always last). Pairwise costs are
/// served lazily from the scene.
GraphicalModel build_stage_one_model(const SceneObservation& scene, const HyperParams& hp);

inline Label outlier_label(const SceneObservation& scene, NodeId u) {
  return static_cast<Label>(scene.nodes[u].candidates.size());
}

/// Fully connected binary master model over `inliers` (sorted scene node
/// ids). Master node i stands for scene node inliers[i]; label 1 keeps the
/// stage-one candidate, label 0 is the outlier.
GraphicalModel build_stage_two_master(const SceneObservation& scene, const HyperParams& hp,
                                      const std::vector<NodeId>& inliers,
                                      const Labeling& stage_one_labels);

/// A pixel whose winning candidate survived inference.
struct PoseConsistentPixel {
  NodeId node = 0;
  int pixel_col = 0;  // full-resolution pixel coordinates
  int pixel_row = 0;
  Vec3 object_coord = Vec3::Zero();
  Vec3 scene_point = Vec3::Zero();
};

/// Pose-consistent pixels of a stage-one labeling (outlier nodes emit nothing).
std::vector<PoseConsistentPixel> pose_consistent_pixels(const SceneObservation& scene,
                                                        const Labeling& labeling);

/// Pose-consistent pixels of a binary labeling over `master_nodes`: every
/// node labeled 1 emits the source pixel of its stage-one candidate.
std::vector<PoseConsistentPixel> pose_consistent_pixels(const SceneObservation& scene,
                                                        const std::vector<NodeId>& master_nodes,
                                                        const Labeling& stage_one_labels,
                                                        const PartialLabeling& binary);

}  // namespace ghg
