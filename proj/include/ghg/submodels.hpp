#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ghg/graphical_model.hpp"
#include "ghg/pose_model.hpp"
#include "ghg/qpbo.hpp"

namespace ghg {

/// 8-connected island of stage-one inlier nodes.
struct Component {
  std::size_t serial = 0;
  std::vector<NodeId> nodes;  // sorted scene node ids
};

/// Node set of one induced submodel of the master model.
struct SubmodelSpec {
  std::size_t seed_component = 0;
  std::vector<std::size_t> member_components;  // includes the seed
  std::vector<NodeId> node_set;                // sorted
};

enum class SubmodelScheme { kComponents, kPerNode };

/// Components under 8-connectivity on the node grid, discovered in
/// row-major order and numbered from 0.
std::vector<Component> connected_components(const std::vector<NodeId>& inliers, int grid_width,
                                            int grid_height);

/// Drops components smaller than `min_size` and renumbers the rest.
std::vector<Component> filter_components(std::vector<Component> components,
                                         std::size_t min_size = 3);

/// One submodel per component f: f plus every later component g whose
/// nodes all lie within the object diameter of all nodes of f (camera
/// space). Node sets are scene node ids.
std::vector<SubmodelSpec> enumerate_submodels(const std::vector<Component>& components,
                                              const SceneObservation& scene);

/// Alternative scheme: for every inlier u, the inliers within the object
/// diameter of u.
std::vector<SubmodelSpec> enumerate_per_node_submodels(const std::vector<NodeId>& inliers,
                                                       const SceneObservation& scene);

/// Removes specs whose node set has fewer than `min_nodes` nodes.
std::vector<SubmodelSpec> drop_small_specs(std::vector<SubmodelSpec> specs,
                                           std::size_t min_nodes = 3);

/// Rewrites a spec's scene node ids as master node indices, where master
/// node i stands for scene node master_nodes[i] (sorted).
SubmodelSpec remap_to_master(const SubmodelSpec& spec, const std::vector<NodeId>& master_nodes);

struct ZeroForm {
  GraphicalModel model;
  double shift = 0.0;  // energy moved into the constant term
};

/// Reparameterizes a binary model so that every edge has
/// theta(0,0) = theta(0,1) = theta(1,0) = 0; pairwise mass moves into the
/// label-1 unaries and the constant. Energies are preserved.
ZeroForm to_zero_form(const GraphicalModel& model);
bool is_zero_form(const GraphicalModel& model);

struct DecomposedResult {
  std::size_t spec_index = 0;
  PartialLabeling labeling;  // over the master; non-members carry 0
  std::size_t submodel_nodes = 0;
  std::size_t infinite_pairs = 0;
  QpboStats stats;
};

/// Solves each induced submodel with QPBO and extends its partial labeling
/// to the master with label 0. Specs are in master indices. Submodels are
/// solved in parallel; results are ordered by spec index.
std::vector<DecomposedResult> solve_decomposed(const GraphicalModel& master,
                                               std::span<const SubmodelSpec> specs);
/// Single-threaded reference of solve_decomposed.
std::vector<DecomposedResult> solve_decomposed_serial(const GraphicalModel& master,
                                                      std::span<const SubmodelSpec> specs);

}  // namespace ghg
