#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ghg/synth.hpp"

namespace ghg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& field(const json& obj, const std::string& where, const char* key) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where.empty() ? key : where + "." + key, "missing required field");
  return *it;
}

std::string sub(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

long long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected an array of 3 numbers");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json pose_to_json(const Pose& p) {
  json r = json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r.push_back(p.rotation(i, k));
  return {{"rotation", r}, {"translation", to_json(p.translation)}};
}

Pose pose_from_json(const json& j, const std::string& where) {
  const json& r = field(j, where, "rotation");
  const std::string rw = sub(where, "rotation");
  if (!r.is_array() || r.size() != 9) fail(rw, "expected 9 numbers (row-major)");
  Pose p;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      p.rotation(i, k) = number(r[static_cast<std::size_t>(3 * i + k)], rw + "[" + std::to_string(3 * i + k) + "]");
  p.translation = vec3(field(j, where, "translation"), sub(where, "translation"));
  return p;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

void check_version(const json& doc, const char* format, int expected) {
  const json& f = field(doc, "", "format");
  if (!f.is_string() || f.get<std::string>() != format) {
    fail("format", std::string("expected \"") + format + "\"");
  }
  const long long v = integer(field(doc, "", "version"), "version");
  if (v != expected) {
    throw ParseError("unsupported " + std::string(format) + " version " + std::to_string(v) +
                     " (this build reads version " + std::to_string(expected) + ")");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string scene_to_json(const SceneFile& f) {
  const SceneObservation& s = f.scene;
  json nodes = json::array();
  for (const SceneNode& n : s.nodes) {
    json cands = json::array();
    for (const Candidate& c : n.candidates) {
      cands.push_back({{"l", to_json(c.object_coord)}, {"p", c.confidence}, {"pixel", c.source_pixel},
                       {"tree", c.source_tree}});
    }
    nodes.push_back({{"x", to_json(n.point)}, {"candidates", cands}});
  }
  json doc = {{"format", "ghg-scene"},
              {"version", kSceneVersion},
              {"grid", {{"width", s.grid_width}, {"height", s.grid_height}}},
              {"diameter", s.diameter},
              {"nodes", nodes}};
  if (!f.object_points.empty()) {
    json pts = json::array();
    for (const Vec3& p : f.object_points) pts.push_back(to_json(p));
    doc["object_points"] = pts;
  }
  if (f.truth) {
    json gt = pose_to_json(f.truth->pose);
    gt["labeling"] = f.truth->labeling;
    doc["ground_truth"] = gt;
  }
  return doc.dump(1) + "\n";
}

SceneFile scene_from_json(const std::string& text) {
  const json doc = parse_text(text);
  check_version(doc, "ghg-scene", kSceneVersion);
  SceneFile f;
  SceneObservation& s = f.scene;
  const json& grid = field(doc, "", "grid");
  s.grid_width = static_cast<int>(integer(field(grid, "grid", "width"), "grid.width"));
  s.grid_height = static_cast<int>(integer(field(grid, "grid", "height"), "grid.height"));
  s.diameter = number(field(doc, "", "diameter"), "diameter");
  const json& nodes = field(doc, "", "nodes");
  if (!nodes.is_array()) fail("nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string nw = "nodes[" + std::to_string(i) + "]";
    SceneNode n;
    n.point = vec3(field(nodes[i], nw, "x"), nw + ".x");
    const json& cands = field(nodes[i], nw, "candidates");
    if (!cands.is_array()) fail(nw + ".candidates", "expected an array");
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const std::string cw = nw + ".candidates[" + std::to_string(k) + "]";
      Candidate c;
      c.object_coord = vec3(field(cands[k], cw, "l"), cw + ".l");
      c.confidence = number(field(cands[k], cw, "p"), cw + ".p");
      c.source_pixel = static_cast<int>(integer(field(cands[k], cw, "pixel"), cw + ".pixel"));
      c.source_tree = static_cast<int>(integer(field(cands[k], cw, "tree"), cw + ".tree"));
      n.candidates.push_back(c);
    }
    s.nodes.push_back(std::move(n));
  }
  try {
    s.validate();
  } catch (const ContractError& e) {
    throw ParseError(e.what());
  }
  if (auto it = doc.find("object_points"); it != doc.end()) {
    if (!it->is_array()) fail("object_points", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      f.object_points.push_back(vec3((*it)[i], "object_points[" + std::to_string(i) + "]"));
  }
  if (auto it = doc.find("ground_truth"); it != doc.end()) {
    GroundTruth gt;
    gt.pose = pose_from_json(*it, "ground_truth");
    const json& lab = field(*it, "ground_truth", "labeling");
    if (!lab.is_array() || lab.size() != s.node_count()) {
      fail("ground_truth.labeling", "expected one label per node");
    }
    for (std::size_t i = 0; i < lab.size(); ++i) {
      const long long l = integer(lab[i], "ground_truth.labeling[" + std::to_string(i) + "]");
      if (l < 0 || static_cast<std::size_t>(l) > s.nodes[i].candidates.size()) {
        fail("ground_truth.labeling[" + std::to_string(i) + "]", "label out of range");
      }
      gt.labeling.push_back(static_cast<Label>(l));
    }
    f.truth = std::move(gt);
  }
  return f;
}

void save_scene(const std::filesystem::path& path, const SceneFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << scene_to_json(f);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

SceneFile load_scene(const std::filesystem::path& path) {
  try {
    return scene_from_json(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

SyntheticScenario scenario_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_text(text);
  check_version(doc, "ghg-scenario", kScenarioVersion);
  SyntheticScenario s;
  auto opt_number = [&](const char* key, double& target) {
    if (auto it = doc.find(key); it != doc.end()) target = number(*it, key);
  };
  s.rng_seed = static_cast<std::uint64_t>(integer(field(doc, "", "seed"), "seed"));
  if (auto it = doc.find("grid"); it != doc.end()) {
    s.grid_width = static_cast<int>(integer(field(*it, "grid", "width"), "grid.width"));
    s.grid_height = static_cast<int>(integer(field(*it, "grid", "height"), "grid.height"));
  }
  if (auto it = doc.find("object"); it != doc.end()) {
    const json& obj = *it;
    if (auto xyz = obj.find("xyz"); xyz != obj.end()) {
      if (!xyz->is_string()) fail("object.xyz", "expected a path string");
      std::filesystem::path p = xyz->get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      s.object_points = load_xyz(p);
    } else {
      const json& boxes = field(obj, "object", "boxes");
      if (!boxes.is_array() || boxes.empty()) fail("object.boxes", "expected a nonempty array");
      s.parts.clear();
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        const std::string w = "object.boxes[" + std::to_string(i) + "]";
        s.parts.push_back({vec3(field(boxes[i], w, "center"), w + ".center"),
                           vec3(field(boxes[i], w, "size"), w + ".size")});
      }
      if (auto k = obj.find("samples"); k != obj.end())
        s.surface_samples = static_cast<int>(integer(*k, "object.samples"));
    }
  }
  if (auto it = doc.find("pose"); it != doc.end()) {
    if (it->is_string() && it->get<std::string>() == "random") {
      s.true_pose = random_pose(s.rng_seed ^ 0x5851f42d4c957f2dULL);
    } else {
      s.true_pose = pose_from_json(*it, "pose");
    }
  }
  opt_number("focal", s.focal);
  opt_number("visible_fraction", s.visible_fraction);
  opt_number("inlier_rate", s.inlier_rate);
  opt_number("coord_noise_sigma", s.coord_noise_sigma);
  opt_number("depth_noise_sigma", s.depth_noise_sigma);
  opt_number("clutter_offset", s.clutter_offset);
  opt_number("clutter_jitter", s.clutter_jitter);
  opt_number("occluder_offset", s.occluder_offset);
  if (auto it = doc.find("confidence"); it != doc.end()) {
    if (auto k = it->find("object_mean"); k != it->end()) s.confidence.object_mean = number(*k, "confidence.object_mean");
    if (auto k = it->find("background_mean"); k != it->end())
      s.confidence.background_mean = number(*k, "confidence.background_mean");
    if (auto k = it->find("spread"); k != it->end()) s.confidence.spread = number(*k, "confidence.spread");
  }
  return s;
}

SyntheticScenario load_scenario(const std::filesystem::path& path) {
  try {
    return scenario_from_json(read_file(path), path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace ghg
