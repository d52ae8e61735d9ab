#include "ghg/submodels.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace ghg {

std::vector<Component> connected_components(const std::vector<NodeId>& inliers, int grid_width,
                                            int grid_height) {
  if (grid_width < 1 || grid_height < 1) throw ContractError("connected_components: bad grid");
  const std::size_t cells = static_cast<std::size_t>(grid_width) * static_cast<std::size_t>(grid_height);
  std::vector<char> mask(cells, 0);
  for (NodeId u : inliers) {
    if (u >= cells) throw ContractError("connected_components: inlier outside grid");
    mask[u] = 1;
  }
  std::vector<Component> out;
  std::vector<char> seen(cells, 0);
  for (std::size_t start = 0; start < cells; ++start) {
    if (!mask[start] || seen[start]) continue;
    Component comp{out.size(), {}};
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const std::size_t c = queue.front();
      queue.pop_front();
      comp.nodes.push_back(static_cast<NodeId>(c));
      const int x = static_cast<int>(c) % grid_width;
      const int y = static_cast<int>(c) / grid_width;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= grid_width || ny >= grid_height) continue;
          const auto nb = static_cast<std::size_t>(ny * grid_width + nx);
          if (mask[nb] && !seen[nb]) {
            seen[nb] = 1;
            queue.push_back(nb);
          }
        }
    }
    std::sort(comp.nodes.begin(), comp.nodes.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Component> filter_components(std::vector<Component> components, std::size_t min_size) {
  std::vector<Component> out;
  for (auto& c : components) {
    if (c.nodes.size() < min_size) continue;
    c.serial = out.size();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<SubmodelSpec> enumerate_submodels(const std::vector<Component>& components,
                                              const SceneObservation& scene) {
  std::vector<SubmodelSpec> specs;
  for (std::size_t f = 0; f < components.size(); ++f) {
    SubmodelSpec spec;
    spec.seed_component = components[f].serial;
    spec.member_components.push_back(components[f].serial);
    spec.node_set = components[f].nodes;
    for (std::size_t g = f + 1; g < components.size(); ++g) {
      bool within = true;
      for (NodeId u : components[f].nodes) {
        for (NodeId v : components[g].nodes) {
          if ((scene.nodes.at(u).point - scene.nodes.at(v).point).norm() > scene.diameter) {
            within = false;
            break;
          }
        }
        if (!within) break;
      }
      if (!within) continue;
      spec.member_components.push_back(components[g].serial);
      spec.node_set.insert(spec.node_set.end(), components[g].nodes.begin(),
                           components[g].nodes.end());
    }
    std::sort(spec.node_set.begin(), spec.node_set.end());
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<SubmodelSpec> enumerate_per_node_submodels(const std::vector<NodeId>& inliers,
                                                       const SceneObservation& scene) {
  std::vector<SubmodelSpec> specs;
  for (std::size_t i = 0; i < inliers.size(); ++i) {
    SubmodelSpec spec;
    spec.seed_component = i;
    const Vec3& xu = scene.nodes.at(inliers[i]).point;
    for (NodeId v : inliers)
      if ((xu - scene.nodes.at(v).point).norm() <= scene.diameter) spec.node_set.push_back(v);
    std::sort(spec.node_set.begin(), spec.node_set.end());
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<SubmodelSpec> drop_small_specs(std::vector<SubmodelSpec> specs, std::size_t min_nodes) {
  std::erase_if(specs, [min_nodes](const SubmodelSpec& s) { return s.node_set.size() < min_nodes; });
  return specs;
}

SubmodelSpec remap_to_master(const SubmodelSpec& spec, const std::vector<NodeId>& master_nodes) {
  SubmodelSpec out = spec;
  out.node_set.clear();
  for (NodeId s : spec.node_set) {
    auto it = std::lower_bound(master_nodes.begin(), master_nodes.end(), s);
    if (it == master_nodes.end() || *it != s) {
      throw ContractError("remap_to_master: scene node " + std::to_string(s) + " not in master");
    }
    out.node_set.push_back(static_cast<NodeId>(it - master_nodes.begin()));
  }
  return out;
}

ZeroForm to_zero_form(const GraphicalModel& model) {
  require_binary(model);
  const double beta = model.pairwise_weight();
  std::vector<std::vector<double>> unaries(model.node_count());
  for (NodeId u = 0; u < model.node_count(); ++u) unaries[u] = {model.unary(u, 0), model.unary(u, 1)};
  std::vector<double> diag(model.edge_count());
  double shift = 0.0;
  for (std::size_t e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.edge(e);
    const double a = model.pairwise(e, 0, 0);
    const double b = model.pairwise(e, 0, 1);
    const double c = model.pairwise(e, 1, 0);
    const double d = model.pairwise(e, 1, 1);
    if (is_infinite(a) || is_infinite(b) || is_infinite(c)) {
      throw ContractError("to_zero_form: edge {" + std::to_string(ed.u) + "," +
                          std::to_string(ed.v) + "} has an infinite (0,0)/(0,1)/(1,0) entry");
    }
    shift += beta * a;
    unaries[ed.u][1] += beta * (c - a);
    unaries[ed.v][1] += beta * (b - a);
    diag[e] = is_infinite(d) ? kInfinity : (a + d) - (b + c);
  }
  ZeroForm out{GraphicalModel(unaries, beta), shift};
  out.model.set_constant(model.constant() + shift);
  for (std::size_t e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.edge(e);
    const double t[4] = {0.0, 0.0, 0.0, diag[e]};
    out.model.add_edge(ed.u, ed.v, t);
  }
  return out;
}

bool is_zero_form(const GraphicalModel& model) {
  for (NodeId u = 0; u < model.node_count(); ++u)
    if (model.label_count(u) != 2) return false;
  for (std::size_t e = 0; e < model.edge_count(); ++e)
    if (model.pairwise(e, 0, 0) != 0.0 || model.pairwise(e, 0, 1) != 0.0 ||
        model.pairwise(e, 1, 0) != 0.0)
      return false;
  return true;
}

namespace {

DecomposedResult solve_one(const GraphicalModel& master, const SubmodelSpec& spec,
                           std::size_t index) {
  InducedSubmodel sub = induce_submodel(master, spec.node_set);
  DecomposedResult r;
  r.spec_index = index;
  r.submodel_nodes = sub.node_map.size();
  r.infinite_pairs = count_infinite_pairs(sub.model);
  const PartialLabeling partial = qpbo(sub.model, &r.stats);
  r.labeling = extend_partial(master.node_count(), partial, sub.node_map, 0);
  return r;
}

void check_decomposition_inputs(const GraphicalModel& master, std::span<const SubmodelSpec> specs) {
  if (!is_zero_form(master)) throw ContractError("solve_decomposed: master is not in zero form");
  for (const SubmodelSpec& s : specs)
    for (NodeId u : s.node_set)
      if (u >= master.node_count()) throw ContractError("solve_decomposed: spec node out of range");
}

}  // namespace

std::vector<DecomposedResult> solve_decomposed_serial(const GraphicalModel& master,
                                                      std::span<const SubmodelSpec> specs) {
  check_decomposition_inputs(master, specs);
  std::vector<DecomposedResult> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) out.push_back(solve_one(master, specs[i], i));
  return out;
}

std::vector<DecomposedResult> solve_decomposed(const GraphicalModel& master,
                                               std::span<const SubmodelSpec> specs) {
  check_decomposition_inputs(master, specs);
  std::vector<DecomposedResult> out(specs.size());
  const auto count = static_cast<std::ptrdiff_t>(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = solve_one(master, specs[k], k);
  }
  return out;
}

}  // namespace ghg
