#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ghg/geometry.hpp"
#include "ghg/kdtree.hpp"
#include "ghg/pose_model.hpp"
#include "ghg/submodels.hpp"

namespace ghg {

/// Raised by kabsch() on fewer than three or collinear correspondences.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Correspondence {
  Vec3 object = Vec3::Zero();  // object frame
  Vec3 scene = Vec3::Zero();   // camera frame
};

/// Least-squares rigid transform minimizing sum |R y + t - x|^2 with a
/// proper rotation (det +1).
Pose kabsch(std::span<const Correspondence> pairs);

struct Hypothesis {
  std::vector<Correspondence> correspondences;
  std::vector<NodeId> nodes;  // scene node ids of the correspondences
  Pose pose;
  double score = kInfinity;  // lower is better
  bool refined = false;
  std::size_t source_spec = 0;
};

struct ClusterDiagnostics {
  std::vector<std::size_t> too_small;    // spec indices with < 3 label-1 nodes
  std::vector<std::size_t> degenerate;   // spec indices where kabsch failed
  std::vector<std::size_t> duplicates;   // spec indices repeating an earlier set
};

/// One hypothesis per decomposed result whose label-1 set has at least
/// three nodes. Results repeating an earlier label-1 set are skipped.
std::vector<Hypothesis> cluster_hypotheses(std::span<const DecomposedResult> results,
                                           const SceneObservation& scene,
                                           const std::vector<NodeId>& master_nodes,
                                           const Labeling& stage_one_labels,
                                           ClusterDiagnostics* diagnostics = nullptr);

struct IcpConfig {
  int max_iterations = 20;
  double tolerance = 1e-6;      // meters
  double trim_fraction = 0.8;   // share of closest pairs kept for fitting and scoring
  double gate_fraction = 0.25;  // association gate as a fraction of the diameter
};

/// Score after the initial pose and after every accepted iteration.
struct IcpTrace {
  std::vector<double> scores;
};

/// Trimmed mean of the best `trim_fraction` closest-point distances of the
/// scene points to the posed object.
double icp_score(const Pose& pose, std::span<const Correspondence> pairs, const KdTree& object,
                 double trim_fraction);

/// Point-to-point ICP of the hypothesis' scene points against the object
/// cloud. Steps that would raise the score are rejected, which ends the
/// iteration. When no pair falls inside the gate the input pose is kept
/// and the score is infinite.
Hypothesis icp_refine(const Hypothesis& h, const KdTree& object, double diameter,
                      const IcpConfig& cfg = {}, IcpTrace* trace = nullptr);

/// Refines every hypothesis; parallel over hypotheses.
std::vector<Hypothesis> refine_all(std::span<const Hypothesis> hyps, const KdTree& object,
                                   double diameter, const IcpConfig& cfg = {});
std::vector<Hypothesis> refine_all_serial(std::span<const Hypothesis> hyps, const KdTree& object,
                                          double diameter, const IcpConfig& cfg = {});

struct Selection {
  std::size_t index = 0;
  bool low_confidence = false;  // every score was infinite
};

/// Minimum score; ties by more correspondences, then lower index.
std::optional<Selection> select_best(std::span<const Hypothesis> hyps);

struct PoseError {
  bool correct = false;
  double average_distance = 0.0;
};

/// Mean displacement of the object points between the two poses; correct
/// when strictly below a tenth of the diameter.
PoseError pose_correct(const Pose& estimated, const Pose& ground_truth, const PointCloud& object,
                       double diameter);

/// RANSAC iterations needed to draw one all-inlier triple with the given
/// confidence: ceil(log(1 - confidence) / log(1 - w^3)).
std::uint64_t ransac_iterations(double inlier_rate, double confidence);

}  // namespace ghg
