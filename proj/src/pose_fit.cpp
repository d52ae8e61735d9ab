#include "ghg/pose_fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/SVD>

namespace ghg {

Pose kabsch(std::span<const Correspondence> pairs) {
  if (pairs.size() < 3) throw DegenerateInput("kabsch: need at least 3 correspondences");
  Vec3 cy = Vec3::Zero(), cx = Vec3::Zero();
  for (const auto& c : pairs) {
    cy += c.object;
    cx += c.scene;
  }
  const double n = static_cast<double>(pairs.size());
  cy /= n;
  cx /= n;
  Mat3 h = Mat3::Zero();
  for (const auto& c : pairs) h += (c.object - cy) * (c.scene - cx).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (!(s[0] > 0.0) || s[1] <= 1e-12 * s[0]) {
    throw DegenerateInput("kabsch: correspondences are collinear or coincident");
  }
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  Pose pose;
  pose.rotation = v * d * u.transpose();
  pose.translation = cx - pose.rotation * cy;
  return pose;
}

std::vector<Hypothesis> cluster_hypotheses(std::span<const DecomposedResult> results,
                                           const SceneObservation& scene,
                                           const std::vector<NodeId>& master_nodes,
                                           const Labeling& stage_one_labels,
                                           ClusterDiagnostics* diagnostics) {
  ClusterDiagnostics local;
  ClusterDiagnostics& diag = diagnostics ? *diagnostics : local;
  std::vector<Hypothesis> out;
  std::set<std::vector<NodeId>> seen;
  for (const DecomposedResult& r : results) {
    const std::vector<NodeId> ones = r.labeling.nodes_with(1);
    if (ones.size() < 3) {
      diag.too_small.push_back(r.spec_index);
      continue;
    }
    if (!seen.insert(ones).second) {
      diag.duplicates.push_back(r.spec_index);
      continue;
    }
    Hypothesis h;
    h.source_spec = r.spec_index;
    for (const auto& px : pose_consistent_pixels(scene, master_nodes, stage_one_labels, r.labeling)) {
      h.correspondences.push_back({px.object_coord, px.scene_point});
      h.nodes.push_back(px.node);
    }
    try {
      h.pose = kabsch(h.correspondences);
    } catch (const DegenerateInput&) {
      diag.degenerate.push_back(r.spec_index);
      continue;
    }
    out.push_back(std::move(h));
  }
  return out;
}

namespace {

struct Association {
  std::vector<double> distance;       // per scene point
  std::vector<std::size_t> nearest;   // object point index
};

Association associate(const Pose& pose, std::span<const Correspondence> pairs, const KdTree& object) {
  Association a;
  a.distance.reserve(pairs.size());
  a.nearest.reserve(pairs.size());
  for (const auto& c : pairs) {
    const auto hit = object.nearest(pose.apply_inverse(c.scene));
    a.distance.push_back(std::sqrt(hit.squared_distance));
    a.nearest.push_back(hit.index);
  }
  return a;
}

std::size_t trimmed_count(std::size_t n, double fraction) {
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

/// Indices of the `k` smallest distances, ties by index.
std::vector<std::size_t> best_indices(const std::vector<double>& d, std::size_t k) {
  std::vector<std::size_t> idx(d.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  idx.resize(k);
  return idx;
}

double trimmed_mean(const std::vector<double>& d, double fraction) {
  const auto idx = best_indices(d, trimmed_count(d.size(), fraction));
  double sum = 0.0;
  for (std::size_t i : idx) sum += d[i];
  return sum / static_cast<double>(idx.size());
}

double pose_change(const Pose& a, const Pose& b, double diameter) {
  return (a.translation - b.translation).norm() +
         0.5 * diameter * (a.rotation - b.rotation).norm();
}

}  // namespace

double icp_score(const Pose& pose, std::span<const Correspondence> pairs, const KdTree& object,
                 double trim_fraction) {
  if (pairs.empty()) return kInfinity;
  return trimmed_mean(associate(pose, pairs, object).distance, trim_fraction);
}

Hypothesis icp_refine(const Hypothesis& h, const KdTree& object, double diameter,
                      const IcpConfig& cfg, IcpTrace* trace) {
  if (object.empty()) throw ContractError("icp_refine: empty object cloud");
  if (h.correspondences.size() < 3) throw ContractError("icp_refine: hypothesis needs >= 3 points");
  if (!(cfg.trim_fraction > 0.0 && cfg.trim_fraction <= 1.0) || cfg.max_iterations < 0 ||
      !(cfg.gate_fraction > 0.0)) {
    throw ContractError("icp_refine: invalid configuration");
  }
  const double gate = cfg.gate_fraction * diameter;
  const auto& pairs = h.correspondences;
  Hypothesis out = h;
  out.refined = true;

  Association assoc = associate(out.pose, pairs, object);
  if (std::none_of(assoc.distance.begin(), assoc.distance.end(), [&](double d) { return d <= gate; })) {
    out.pose = h.pose;
    out.score = kInfinity;
    if (trace) trace->scores.push_back(kInfinity);
    return out;
  }
  double score = trimmed_mean(assoc.distance, cfg.trim_fraction);
  if (trace) trace->scores.push_back(score);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::vector<Correspondence> fit;
    for (std::size_t i : best_indices(assoc.distance, trimmed_count(pairs.size(), cfg.trim_fraction)))
      if (assoc.distance[i] <= gate) fit.push_back({object.points()[assoc.nearest[i]], pairs[i].scene});
    Pose next;
    try {
      next = kabsch(fit);
    } catch (const DegenerateInput&) {
      break;
    }
    Association next_assoc = associate(next, pairs, object);
    const double next_score = trimmed_mean(next_assoc.distance, cfg.trim_fraction);
    if (next_score > score) break;
    const double change = pose_change(next, out.pose, diameter);
    out.pose = next;
    assoc = std::move(next_assoc);
    score = next_score;
    if (trace) trace->scores.push_back(score);
    if (change < cfg.tolerance) break;
  }
  out.score = score;
  return out;
}

std::vector<Hypothesis> refine_all_serial(std::span<const Hypothesis> hyps, const KdTree& object,
                                          double diameter, const IcpConfig& cfg) {
  std::vector<Hypothesis> out;
  out.reserve(hyps.size());
  for (const auto& h : hyps) out.push_back(icp_refine(h, object, diameter, cfg));
  return out;
}

std::vector<Hypothesis> refine_all(std::span<const Hypothesis> hyps, const KdTree& object,
                                   double diameter, const IcpConfig& cfg) {
  std::vector<Hypothesis> out(hyps.size());
  const auto count = static_cast<std::ptrdiff_t>(hyps.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = icp_refine(hyps[k], object, diameter, cfg);
  }
  return out;
}

std::optional<Selection> select_best(std::span<const Hypothesis> hyps) {
  if (hyps.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < hyps.size(); ++i) {
    const Hypothesis& a = hyps[i];
    const Hypothesis& b = hyps[best];
    if (a.score < b.score ||
        (a.score == b.score && a.correspondences.size() > b.correspondences.size())) {
      best = i;
    }
  }
  return Selection{best, is_infinite(hyps[best].score)};
}

PoseError pose_correct(const Pose& estimated, const Pose& ground_truth, const PointCloud& object,
                       double diameter) {
  if (object.empty()) throw ContractError("pose_correct: empty object cloud");
  double sum = 0.0;
  for (const Vec3& p : object) sum += (estimated.apply(p) - ground_truth.apply(p)).norm();
  const double avg = sum / static_cast<double>(object.size());
  return {avg < 0.1 * diameter, avg};
}

std::uint64_t ransac_iterations(double inlier_rate, double confidence) {
  if (!(inlier_rate > 0.0 && inlier_rate < 1.0) || !(confidence > 0.0 && confidence < 1.0)) {
    throw ContractError("ransac_iterations: arguments must lie in (0,1)");
  }
  const double triple = inlier_rate * inlier_rate * inlier_rate;
  const double k = std::ceil(std::log1p(-confidence) / std::log1p(-triple));
  return static_cast<std::uint64_t>(std::max(1.0, k));
}

}  // namespace ghg
