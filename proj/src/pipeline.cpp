#include "ghg/pipeline.hpp"

#include <chrono>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ghg {

SubmodelScheme parse_scheme(const std::string& name) {
  if (name == "components") return SubmodelScheme::kComponents;
  if (name == "per-node") return SubmodelScheme::kPerNode;
  throw ParseError("unknown submodel scheme '" + name + "' (components|per-node)");
}

const char* scheme_name(SubmodelScheme s) {
  return s == SubmodelScheme::kComponents ? "components" : "per-node";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& text, int line, const std::string& key) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("config line " + std::to_string(line) + ": bad value '" + text + "' for " + key);
  }
  return v;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, PipelineConfig cfg) {
  std::istringstream in(text);
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    auto real = [&] { return parse_value<double>(val, line, key); };
    auto count = [&] { return parse_value<std::size_t>(val, line, key); };
    if (key == "stage_one.alpha") cfg.stage_one.alpha = real();
    else if (key == "stage_one.beta") cfg.stage_one.beta = real();
    else if (key == "stage_one.gamma") cfg.stage_one.gamma = real();
    else if (key == "stage_two.alpha") cfg.stage_two.alpha = real();
    else if (key == "stage_two.beta") cfg.stage_two.beta = real();
    else if (key == "stage_two.gamma") cfg.stage_two.gamma = real();
    else if (key == "trws.iterations") cfg.trws.iterations = parse_value<int>(val, line, key);
    else if (key == "icp.max_iterations") cfg.icp.max_iterations = parse_value<int>(val, line, key);
    else if (key == "icp.tolerance") cfg.icp.tolerance = real();
    else if (key == "icp.trim_fraction") cfg.icp.trim_fraction = real();
    else if (key == "icp.gate_fraction") cfg.icp.gate_fraction = real();
    else if (key == "submodels.scheme") cfg.scheme = parse_scheme(val);
    else if (key == "submodels.min_component_size") cfg.min_component_size = count();
    else if (key == "submodels.warn_above") cfg.submodel_warning = count();
    else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(val, line, key);
    else throw ParseError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  try {
    cfg.stage_one.validate();
    cfg.stage_two.validate();
  } catch (const ContractError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (cfg.trws.iterations < 1) throw ParseError("config: trws.iterations must be >= 1");
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), base);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

}  // namespace

RunReport run_pipeline(const SceneFile& file, const PipelineConfig& cfg) {
  const SceneObservation& scene = file.scene;
  scene.validate();
  if (file.object_points.empty()) throw ContractError("run_pipeline: scene carries no object points");
  RunReport r;
  r.node_count = scene.node_count();
  r.scheme = scheme_name(cfg.scheme);
  const auto t_start = Clock::now();

  // Stage one: sparse multi-label model, TRW-S, inliers.
  GraphicalModel stage_one = build_stage_one_model(scene, cfg.stage_one);
  stage_one.memoize_pairwise();
  const TrwsResult trws = solve_trws(stage_one, cfg.trws);
  const std::vector<NodeId> inliers = extract_inliers(stage_one, trws.labeling);
  r.stage_one_inliers = inliers.size();
  r.stage_one_energy = evaluate_energy(stage_one, trws.labeling).value();
  r.stage_one_bound = trws.lower_bound;
  r.bound_history = trws.bound_history;
  r.infinite_message_row = trws.diagnostics.infinite_message_row;
  r.unary_fallback_nodes = trws.diagnostics.unary_fallback_nodes.size();
  r.timings.stage_one_ms = ms_since(t_start);

  // Stage two: fully connected binary master, decomposed into submodels.
  const auto t_two = Clock::now();
  std::vector<DecomposedResult> decomposed;
  if (!inliers.empty()) {
    std::vector<SubmodelSpec> specs;
    if (cfg.scheme == SubmodelScheme::kComponents) {
      const auto comps = filter_components(
          connected_components(inliers, scene.grid_width, scene.grid_height), cfg.min_component_size);
      r.components = comps.size();
      specs = enumerate_submodels(comps, scene);
    } else {
      specs = enumerate_per_node_submodels(inliers, scene);
    }
    specs = drop_small_specs(std::move(specs), 3);
    for (auto& s : specs) s = remap_to_master(s, inliers);
    r.submodels = specs.size();
    r.too_many_submodels = specs.size() > cfg.submodel_warning;
    for (const auto& s : specs) r.submodel_sizes.push_back(s.node_set.size());
    if (!specs.empty()) {
      const GraphicalModel master = build_stage_two_master(scene, cfg.stage_two, inliers, trws.labeling);
      const ZeroForm zf = to_zero_form(master);
      decomposed = solve_decomposed(zf.model, specs);
    }
  }
  r.timings.stage_two_ms = ms_since(t_two);

  // Hypotheses, ICP refinement, selection.
  const auto t_fit = Clock::now();
  std::vector<Hypothesis> hyps = cluster_hypotheses(decomposed, scene, inliers, trws.labeling);
  for (const Hypothesis& h : hyps)
    for (std::size_t i = 0; i < h.nodes.size(); ++i)
      for (std::size_t k = i + 1; k < h.nodes.size(); ++k)
        if ((scene.nodes[h.nodes[i]].point - scene.nodes[h.nodes[k]].point).norm() > scene.diameter)
          ++r.exclusion_violations;
  const KdTree tree(file.object_points);
  std::vector<double> initial(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i)
    initial[i] = icp_score(hyps[i].pose, hyps[i].correspondences, tree, cfg.icp.trim_fraction);
  const std::vector<Hypothesis> refined = refine_all(hyps, tree, scene.diameter, cfg.icp);
  r.hypothesis_count = refined.size();
  for (std::size_t i = 0; i < refined.size(); ++i) {
    r.hypotheses.push_back({refined[i].source_spec, refined[i].correspondences.size(), initial[i],
                            refined[i].score, refined[i].pose});
  }
  if (const auto sel = select_best(refined)) {
    r.detected = true;
    r.selected = sel->index;
    r.pose = refined[sel->index].pose;
    r.score = refined[sel->index].score;
    r.low_confidence = sel->low_confidence;
    if (file.truth) r.evaluation = pose_correct(r.pose, file.truth->pose, file.object_points, scene.diameter);
  }
  r.timings.pose_fit_ms = ms_since(t_fit);
  r.timings.total_ms = ms_since(t_start);
  return r;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson pose_json(const Pose& p) {
  ojson rot = ojson::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) rot.push_back(p.rotation(i, k));
  return {{"rotation", rot},
          {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

}  // namespace

std::string report_to_json(const RunReport& r, bool canonical) {
  ojson doc;
  doc["format"] = "ghg-report";
  doc["version"] = kReportVersion;
  doc["status"] = r.detected ? "detected" : "no-detection";
  doc["scheme"] = r.scheme;
  doc["nodes"] = r.node_count;
  ojson one;
  one["inliers"] = r.stage_one_inliers;
  one["energy"] = number_or_null(r.stage_one_energy);
  one["lower_bound"] = number_or_null(r.stage_one_bound);
  ojson hist = ojson::array();
  for (double b : r.bound_history) hist.push_back(number_or_null(b));
  one["bound_history"] = hist;
  one["infinite_message_row"] = r.infinite_message_row;
  one["unary_fallback_nodes"] = r.unary_fallback_nodes;
  doc["stage_one"] = one;
  ojson two;
  two["components"] = r.components;
  two["submodels"] = r.submodels;
  two["submodel_sizes"] = r.submodel_sizes;
  two["too_many_submodels"] = r.too_many_submodels;
  doc["stage_two"] = two;
  ojson hyps = ojson::array();
  for (const auto& h : r.hypotheses) {
    ojson j;
    j["source_submodel"] = h.source_spec;
    j["correspondences"] = h.correspondences;
    j["initial_score"] = number_or_null(h.initial_score);
    j["score"] = number_or_null(h.score);
    j["pose"] = pose_json(h.pose);
    hyps.push_back(j);
  }
  doc["hypothesis_count"] = r.hypothesis_count;
  doc["hypotheses"] = hyps;
  if (r.detected) {
    ojson sel;
    sel["index"] = r.selected;
    sel["pose"] = pose_json(r.pose);
    sel["score"] = number_or_null(r.score);
    sel["low_confidence"] = r.low_confidence;
    doc["selected"] = sel;
  } else {
    doc["selected"] = nullptr;
  }
  if (r.evaluation) {
    doc["evaluation"] = {{"correct", r.evaluation->correct},
                         {"average_distance", r.evaluation->average_distance}};
  }
  doc["exclusion_violations"] = r.exclusion_violations;
  if (!canonical) {
    doc["timings_ms"] = {{"stage_one", r.timings.stage_one_ms},
                         {"stage_two", r.timings.stage_two_ms},
                         {"pose_fit", r.timings.pose_fit_ms},
                         {"total", r.timings.total_ms}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace ghg
