#include "ghg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace ghg {

PointCloud sample_box_surface(const Vec3& size, int samples, std::uint64_t seed) {
  if (samples < 1 || !(size.minCoeff() > 0.0)) throw ContractError("sample_box_surface: bad box");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec3 h = 0.5 * size;
  const double areas[3] = {size.y() * size.z(), size.x() * size.z(), size.x() * size.y()};
  const double total = areas[0] + areas[1] + areas[2];
  PointCloud out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    double pick = unit(rng) * total;
    int axis = 0;
    while (axis < 2 && pick >= areas[axis]) pick -= areas[axis++];
    const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = (unit(rng) * 2.0 - 1.0) * h[k];
    p[axis] = side * h[axis];
    out.push_back(p);
  }
  return out;
}

std::vector<BoxPart> default_object_parts() {
  return {{Vec3(0.0, 0.0, 0.0), Vec3(0.10, 0.04, 0.05)}, {Vec3(0.03, 0.055, 0.0), Vec3(0.04, 0.07, 0.05)}};
}

PointCloud sample_parts_surface(const std::vector<BoxPart>& parts, int samples, std::uint64_t seed) {
  if (parts.empty() || samples < 1) throw ContractError("sample_parts_surface: nothing to sample");
  std::vector<double> area;
  for (const BoxPart& p : parts) {
    if (!(p.size.minCoeff() > 0.0)) throw ContractError("sample_parts_surface: box sizes must be > 0");
    area.push_back(2.0 * (p.size.x() * p.size.y() + p.size.y() * p.size.z() + p.size.x() * p.size.z()));
  }
  const double total = std::accumulate(area.begin(), area.end(), 0.0);
  PointCloud out;
  int assigned = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const int k = i + 1 == parts.size() ? samples - assigned
                                        : static_cast<int>(std::lround(samples * area[i] / total));
    assigned += k;
    if (k < 1) continue;
    for (const Vec3& q : sample_box_surface(parts[i].size, k, seed + i)) out.push_back(q + parts[i].center);
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& q : out) centroid += q;
  centroid /= static_cast<double>(out.size());
  for (Vec3& q : out) q -= centroid;
  return out;
}

double point_cloud_diameter_serial(const PointCloud& points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::max(best, (points[i] - points[j]).squaredNorm());
  return std::sqrt(best);
}

double point_cloud_diameter(const PointCloud& points) {
  double best = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 64) reduction(max : best)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = i + 1; j < n; ++j)
      best = std::max(best, (points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]).squaredNorm());
  return std::sqrt(best);
}

Pose random_pose(std::uint64_t seed, double min_depth, double max_depth, double lateral) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  Pose p;
  p.rotation = q.toRotationMatrix();
  p.translation = Vec3((unit(rng) * 2.0 - 1.0) * lateral, (unit(rng) * 2.0 - 1.0) * lateral,
                       min_depth + unit(rng) * (max_depth - min_depth));
  return p;
}

namespace {

void check_scenario(const SyntheticScenario& s) {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (s.grid_width < 1 || s.grid_height < 1) throw ContractError("scenario: grid must be >= 1x1");
  if (!(s.focal > 0.0)) throw ContractError("scenario: focal must be > 0");
  if (!in01(s.visible_fraction)) throw ContractError("scenario: visible_fraction outside [0,1]");
  if (!in01(s.inlier_rate)) throw ContractError("scenario: inlier_rate outside [0,1]");
  if (!(s.coord_noise_sigma >= 0.0) || !(s.depth_noise_sigma >= 0.0) || !(s.clutter_jitter >= 0.0)) {
    throw ContractError("scenario: noise levels must be >= 0");
  }
  if (!(s.confidence.spread >= 0.0) || !in01(s.confidence.object_mean) ||
      !in01(s.confidence.background_mean)) {
    throw ContractError("scenario: bad confidence model");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

GeneratedScene generate_scene(const SyntheticScenario& s) {
  check_scenario(s);
  GeneratedScene g;
  g.object_points = s.object_points.empty()
                        ? sample_parts_surface(s.parts, s.surface_samples, s.rng_seed ^ 0x9e3779b97f4a7c15ULL)
                        : s.object_points;
  if (g.object_points.size() < 2) throw ContractError("scenario: object needs at least 2 points");
  const double diameter = point_cloud_diameter(g.object_points);
  g.truth.pose = s.true_pose;

  std::mt19937_64 rng(s.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int w = s.grid_width, h = s.grid_height;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const double cx = 0.5 * (w - 1), cy = 0.5 * (h - 1);

  // Z-buffer splatting of the posed object onto node centres.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> hit(n, kNone);
  std::vector<double> depth(n, kInfinity);
  for (std::size_t i = 0; i < g.object_points.size(); ++i) {
    const Vec3 x = s.true_pose.apply(g.object_points[i]);
    if (!(x.z() > 0.0)) continue;
    const long col = std::lround(s.focal * x.x() / x.z() + cx);
    const long row = std::lround(s.focal * x.y() / x.z() + cy);
    if (col < 0 || row < 0 || col >= w || row >= h) continue;
    const auto u = static_cast<std::size_t>(row * w + col);
    if (x.z() < depth[u]) {
      depth[u] = x.z();
      hit[u] = i;
    }
  }
  std::vector<NodeId> object_nodes;
  for (std::size_t u = 0; u < n; ++u)
    if (hit[u] != kNone) object_nodes.push_back(static_cast<NodeId>(u));
  g.object_nodes = object_nodes.size();

  // Occlusion sweeps a random image direction so the hidden part is contiguous.
  std::vector<char> occluded(n, 0);
  {
    const double angle = unit(rng) * 2.0 * std::acos(-1.0);
    const double dx = std::cos(angle), dy = std::sin(angle);
    std::vector<NodeId> order = object_nodes;
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      return dx * (a % w) + dy * (a / w) < dx * (b % w) + dy * (b / w);
    });
    const auto hidden = static_cast<std::size_t>(
        std::llround((1.0 - s.visible_fraction) * static_cast<double>(order.size())));
    for (std::size_t k = 0; k < hidden; ++k) occluded[order[k]] = 1;
  }
  g.visible_nodes = g.object_nodes - static_cast<std::size_t>(std::count(occluded.begin(), occluded.end(), 1));
  if (g.visible_nodes == 0) throw ContractError("scenario: no visible object nodes");

  const double centre_z = s.true_pose.translation.z();
  auto ray_point = [&](std::size_t u, double z) {
    const double col = static_cast<double>(u % w), row = static_cast<double>(u / w);
    return Vec3((col - cx) * z / s.focal, (row - cy) * z / s.focal, z);
  };
  auto random_coord = [&]() {
    return g.object_points[static_cast<std::size_t>(unit(rng) * static_cast<double>(g.object_points.size())) %
                           g.object_points.size()];
  };

  g.scene.grid_width = w;
  g.scene.grid_height = h;
  g.scene.diameter = diameter;
  g.scene.nodes.resize(n);
  g.truth.labeling.assign(n, static_cast<Label>(kMaxCandidatesPerNode));
  for (std::size_t u = 0; u < n; ++u) {
    SceneNode& node = g.scene.nodes[u];
    const bool on_object = hit[u] != kNone && !occluded[u];
    if (on_object) {
      node.point = s.true_pose.apply(g.object_points[hit[u]]);
      node.point.z() += s.depth_noise_sigma * normal(rng);
    } else if (hit[u] != kNone) {
      node.point = ray_point(u, centre_z - s.occluder_offset + s.clutter_jitter * (unit(rng) - 0.5));
    } else {
      node.point = ray_point(u, centre_z + s.clutter_offset + s.clutter_jitter * (unit(rng) - 0.5));
    }
    const double mean = on_object ? s.confidence.object_mean : s.confidence.background_mean;
    double pixel_conf[4];
    for (double& p : pixel_conf) p = clamp01(mean + s.confidence.spread * normal(rng));
    for (int pix = 0; pix < 4; ++pix)
      for (int tree = 0; tree < 3; ++tree)
        node.candidates.push_back({random_coord(), pixel_conf[pix], pix, tree});
    if (on_object && unit(rng) < s.inlier_rate) {
      const auto slot = static_cast<std::size_t>(unit(rng) * kMaxCandidatesPerNode) % kMaxCandidatesPerNode;
      Vec3 coord = g.object_points[hit[u]];
      for (int k = 0; k < 3; ++k) coord[k] += s.coord_noise_sigma * normal(rng);
      node.candidates[slot].object_coord = coord;
      g.truth.labeling[u] = static_cast<Label>(slot);
    }
  }
  g.scene.validate();
  return g;
}

PointCloud load_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  PointCloud out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x)) continue;
    std::string rest;
    if (!(ss >> y >> z) || (ss >> rest)) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected three numbers");
    }
    out.emplace_back(x, y, z);
  }
  if (out.empty()) throw ParseError(path.string() + ": no points");
  return out;
}

}  // namespace ghg
