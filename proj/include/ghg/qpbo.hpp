#pragma once

#include <cstddef>

#include "ghg/graphical_model.hpp"
#include "ghg/maxflow.hpp"

namespace ghg {

struct QpboStats {
  double lower_bound = 0.0;         // roof-dual bound (energy units, clamped costs)
  double infinity_capacity = 0.0;   // finite stand-in used for infinite costs
  std::size_t demoted_nodes = 0;    // labels removed by the infinite-pair check
};

/// Throws unless every node of `model` has exactly two labels.
void require_binary(const GraphicalModel& model);

/// Builds the doubled implication network of a binary model. Node 0 is the
/// source, node 1 the sink, 2 + u stands for x_u and 2 + n + u for its
/// complement. Infinite costs are replaced by `infinity_capacity`.
FlowNetwork build_implication_network(const GraphicalModel& model, double infinity_capacity,
                                      double* constant_out = nullptr);

/// Roof-duality (QPBO) partial labeling with strong persistency: a node is
/// labeled only if it sits on the same side in every minimum cut.
PartialLabeling qpbo(const GraphicalModel& model, QpboStats* stats = nullptr);

/// Number of edges whose (1,1) entry is infinite.
std::size_t count_infinite_pairs(const GraphicalModel& model);

}  // namespace ghg
