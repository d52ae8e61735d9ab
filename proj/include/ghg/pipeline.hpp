#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ghg/pose_fit.hpp"
#include "ghg/pose_model.hpp"
#include "ghg/submodels.hpp"
#include "ghg/synth.hpp"
#include "ghg/trws.hpp"

namespace ghg {

struct PipelineConfig {
  HyperParams stage_one = HyperParams::stage_one();
  HyperParams stage_two = HyperParams::stage_two();
  TrwsConfig trws;  // 10 iterations
  IcpConfig icp;
  SubmodelScheme scheme = SubmodelScheme::kComponents;
  std::size_t min_component_size = 3;
  std::size_t submodel_warning = 20;
  std::uint64_t seed = 1;
};

/// Flat "section.key = value" text; '#' starts a comment. Unknown keys and
/// malformed values raise ParseError with the line number.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
SubmodelScheme parse_scheme(const std::string& name);
const char* scheme_name(SubmodelScheme s);

struct HypothesisSummary {
  std::size_t source_spec = 0;
  std::size_t correspondences = 0;
  double initial_score = 0.0;
  double score = 0.0;
  Pose pose;
};

struct StageTimings {
  double stage_one_ms = 0.0;
  double stage_two_ms = 0.0;
  double pose_fit_ms = 0.0;
  double total_ms = 0.0;
};

inline constexpr int kReportVersion = 1;

struct RunReport {
  bool detected = false;
  std::size_t node_count = 0;
  std::size_t stage_one_inliers = 0;
  double stage_one_energy = 0.0;
  double stage_one_bound = 0.0;
  std::vector<double> bound_history;
  bool infinite_message_row = false;
  std::size_t unary_fallback_nodes = 0;
  std::size_t components = 0;
  std::size_t submodels = 0;
  bool too_many_submodels = false;
  std::vector<std::size_t> submodel_sizes;
  std::size_t hypothesis_count = 0;
  std::vector<HypothesisSummary> hypotheses;
  std::size_t selected = 0;
  Pose pose;
  double score = kInfinity;
  bool low_confidence = false;
  std::optional<PoseError> evaluation;  // only with ground truth
  std::size_t exclusion_violations = 0;  // label-1 pairs farther apart than D
  std::string scheme;
  StageTimings timings;
};

/// Stage one, stage two, hypothesis clustering, ICP and selection.
/// Requires object points in the scene file.
RunReport run_pipeline(const SceneFile& scene, const PipelineConfig& cfg);

/// Report JSON with a fixed field order. Canonical mode drops timings so
/// repeated runs compare byte for byte.
std::string report_to_json(const RunReport& r, bool canonical = false);

}  // namespace ghg
