#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ghg/geometry.hpp"
#include "ghg/pose_model.hpp"

namespace ghg {

/// Malformed scene, scenario, config or point-cloud input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-pixel object probability model: object pixels draw from
/// N(object_mean, spread), all others from N(background_mean, spread),
/// clamped to [0,1]. The three trees of a pixel share the value.
struct ConfidenceModel {
  double object_mean = 0.75;
  double background_mean = 0.2;
  double spread = 0.15;
};

/// Axis-aligned box in the object frame.
struct BoxPart {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
};

/// L-shaped union of two boxes; unlike a single box it has no rotational
/// symmetry, so a pose is identifiable from its surface.
std::vector<BoxPart> default_object_parts();

/// Synthetic scene description. Units are meters; the camera sits at the
/// origin looking down +z and `focal` is expressed in node units.
struct SyntheticScenario {
  PointCloud object_points;   // object frame; sampled from `parts` when empty
  std::vector<BoxPart> parts = default_object_parts();
  int surface_samples = 4000;
  Pose true_pose{Mat3::Identity(), Vec3(0.0, 0.0, 0.8)};
  int grid_width = 32;
  int grid_height = 24;
  double focal = 80.0;
  double visible_fraction = 1.0;  // share of object nodes left unoccluded
  double inlier_rate = 0.5;       // chance an object node holds its true coordinate
  double coord_noise_sigma = 0.0;
  double depth_noise_sigma = 0.0;
  double clutter_offset = 0.3;     // clutter plane depth behind the object centre
  double clutter_jitter = 0.01;
  double occluder_offset = 0.2;    // occluder depth in front of the object centre
  ConfidenceModel confidence;
  std::uint64_t rng_seed = 1;
};

struct GroundTruth {
  Pose pose;
  Labeling labeling;  // true candidate index, or the outlier label
};

struct GeneratedScene {
  SceneObservation scene;
  GroundTruth truth;
  PointCloud object_points;
  std::size_t object_nodes = 0;   // nodes covered by the object before occlusion
  std::size_t visible_nodes = 0;  // of which unoccluded
};

/// Uniform samples on the surface of an axis-aligned box centred at the origin.
PointCloud sample_box_surface(const Vec3& size, int samples, std::uint64_t seed);
/// Area-weighted surface samples of a union of boxes, shifted so the
/// centroid is the origin. Faces inside other parts are sampled too.
PointCloud sample_parts_surface(const std::vector<BoxPart>& parts, int samples, std::uint64_t seed);

/// Maximum pairwise distance; parallel over the first point.
double point_cloud_diameter(const PointCloud& points);
double point_cloud_diameter_serial(const PointCloud& points);

/// Deterministic in rng_seed. Throws ContractError when no object node
/// stays visible.
GeneratedScene generate_scene(const SyntheticScenario& s);

/// Uniformly random rotation and a translation that keeps the object in view.
Pose random_pose(std::uint64_t seed, double min_depth = 0.7, double max_depth = 0.9,
                 double lateral = 0.03);

/// Whitespace separated "x y z" rows; '#' starts a comment.
PointCloud load_xyz(const std::filesystem::path& path);

inline constexpr int kSceneVersion = 1;
inline constexpr int kScenarioVersion = 1;

/// Contents of a scene file. Object points and ground truth are optional.
struct SceneFile {
  SceneObservation scene;
  PointCloud object_points;
  std::optional<GroundTruth> truth;
};

std::string scene_to_json(const SceneFile& f);
SceneFile scene_from_json(const std::string& text);
void save_scene(const std::filesystem::path& path, const SceneFile& f);
SceneFile load_scene(const std::filesystem::path& path);

/// Scenario file: relative "object_xyz" paths resolve against `base_dir`.
SyntheticScenario scenario_from_json(const std::string& text,
                                     const std::filesystem::path& base_dir = {});
SyntheticScenario load_scenario(const std::filesystem::path& path);

}  // namespace ghg
