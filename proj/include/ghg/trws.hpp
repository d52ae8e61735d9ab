#pragma once

#include <vector>

#include "ghg/graphical_model.hpp"

namespace ghg {

/// Sequential tree-reweighted message passing (TRW-S) on monotone chains
/// induced by node index order.
struct TrwsConfig {
  int iterations = 10;
};

struct TrwsDiagnostics {
  /// Some message had no finite entry (every label of the receiver was
  /// blocked by infinite pairwise costs).
  bool infinite_message_row = false;
  /// Nodes whose conditional costs were all infinite during rounding; they
  /// received their unary argmin instead.
  std::vector<NodeId> unary_fallback_nodes;
};

struct TrwsResult {
  Labeling labeling;
  double lower_bound = 0.0;
  std::vector<double> bound_history;  // one entry per iteration
  TrwsDiagnostics diagnostics;
};

TrwsResult solve_trws(const GraphicalModel& model, const TrwsConfig& config = {});

/// Nodes whose label differs from `outlier_label`.
std::vector<NodeId> extract_inliers(const Labeling& labeling, Label outlier_label);
/// Same, treating the last label of every node as its outlier label.
std::vector<NodeId> extract_inliers(const GraphicalModel& model, const Labeling& labeling);

}  // namespace ghg
