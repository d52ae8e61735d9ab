#pragma once

#include <cstddef>
#include <vector>

namespace ghg {

struct Arc {
  std::size_t from = 0;
  std::size_t to = 0;
  double capacity = 0.0;
};

struct FlowNetwork {
  std::size_t node_count = 0;
  std::vector<Arc> arcs;
  std::size_t source = 0;
  std::size_t sink = 1;
};

struct MaxFlowResult {
  double flow_value = 0.0;
  /// Nodes reachable from the source in the final residual network: the
  /// source side of the minimal minimum cut.
  std::vector<bool> source_side;
  std::vector<double> arc_flow;  // parallel to FlowNetwork::arcs
};

/// Dinic maximum flow. Residual capacities at or below `epsilon` are
/// treated as saturated.
MaxFlowResult max_flow(const FlowNetwork& net, double epsilon = 0.0);

/// Sum of capacities of arcs leaving `source_side`.
double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side);

}  // namespace ghg
