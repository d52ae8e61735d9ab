#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ghg/cost.hpp"

namespace ghg {

using NodeId = std::uint32_t;
using Label = std::uint32_t;

/// Unordered node pair stored canonically with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
};

struct Incidence {
  std::size_t edge = 0;
  NodeId other = 0;
  bool node_is_u = false;  // true when this node is edge.u
};

/// Deterministic pairwise cost callback. Receives the edge index and the
/// labels of edge.u and edge.v (canonical orientation).
using PairwiseFn = std::function<double(std::size_t edge, Label lu, Label lv)>;

/// Pairwise graphical model (G, L, theta) with an energy
///   E(l) = sum_u theta_u(l_u) + beta * sum_uv theta_uv(l_u, l_v) + constant.
///
/// Pairwise tables are either materialized per edge or served by a shared
/// lazy callback; memoize_pairwise() turns lazy edges into tables. A model
/// is meant to be built once and then only read.
class GraphicalModel {
 public:
  GraphicalModel() = default;
  explicit GraphicalModel(const std::vector<std::vector<double>>& unaries,
                          double pairwise_weight = 1.0);

  std::size_t node_count() const { return label_counts_.size(); }
  std::size_t label_count(NodeId u) const { return label_counts_.at(u); }
  std::span<const std::size_t> label_counts() const { return label_counts_; }

  std::span<const double> unary(NodeId u) const {
    return {unary_data_.data() + unary_offset_[u], label_counts_[u]};
  }
  double unary(NodeId u, Label l) const { return unary_data_[unary_offset_[u] + l]; }
  void set_unary(NodeId u, Label l, double value);

  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Incidence> neighbors(NodeId u) const { return adjacency_[u]; }
  std::optional<std::size_t> find_edge(NodeId a, NodeId b) const;

  /// Adds edge {a, b} with a table indexed [la * |L_b| + lb]. The table is
  /// transposed when a > b so storage is always in canonical orientation.
  std::size_t add_edge(NodeId a, NodeId b, std::span<const double> table);
  /// Adds edge {a, b} whose costs come from the lazy callback.
  std::size_t add_lazy_edge(NodeId a, NodeId b);
  void set_lazy_pairwise(PairwiseFn fn) { lazy_ = std::move(fn); }

  bool is_materialized(std::size_t e) const { return table_offset_[e] != kLazy; }
  /// Raw theta_uv (not multiplied by beta), canonical orientation.
  double pairwise(std::size_t e, Label lu, Label lv) const;
  /// Pairwise cost with labels given for (a, b) in arbitrary order.
  double pairwise_oriented(std::size_t e, NodeId a, Label la, Label lb) const;
  void fill_pairwise(std::size_t e, std::span<double> out) const;
  void set_pairwise(std::size_t e, Label lu, Label lv, double value);

  /// Materializes every lazy edge. Edges are filled in parallel; the
  /// serial variant is the reference used by tests and benchmarks.
  void memoize_pairwise();
  void memoize_pairwise_serial();

  double pairwise_weight() const { return beta_; }
  void set_pairwise_weight(double beta);
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }

 private:
  static constexpr std::size_t kLazy = static_cast<std::size_t>(-1);

  std::size_t insert_edge(NodeId a, NodeId b);
  void check_value(double v) const;
  std::size_t reserve_tables();

  std::vector<std::size_t> label_counts_;
  std::vector<std::size_t> unary_offset_;
  std::vector<double> unary_data_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
  std::vector<std::size_t> table_offset_;
  std::vector<double> table_data_;
  PairwiseFn lazy_;
  double beta_ = 1.0;
  double constant_ = 0.0;
};

/// One label index per node.
using Labeling = std::vector<Label>;

/// Assignment over {label, unlabeled} per node.
class PartialLabeling {
 public:
  PartialLabeling() = default;
  explicit PartialLabeling(std::size_t n) : values_(n) {}

  std::size_t size() const { return values_.size(); }
  const std::optional<Label>& operator[](std::size_t i) const { return values_[i]; }
  std::optional<Label>& operator[](std::size_t i) { return values_[i]; }
  bool labeled(std::size_t i) const { return values_[i].has_value(); }
  std::size_t labeled_count() const;
  /// Nodes carrying exactly `label`.
  std::vector<NodeId> nodes_with(Label label) const;

  friend bool operator==(const PartialLabeling&, const PartialLabeling&) = default;

 private:
  std::vector<std::optional<Label>> values_;
};

PartialLabeling to_partial(const Labeling& l);

/// Sum of unary and beta-weighted pairwise costs plus the model constant.
/// Infinite when any term is infinite.
Cost evaluate_energy(const GraphicalModel& model, const Labeling& labeling);

struct InducedSubmodel {
  GraphicalModel model;
  std::vector<NodeId> node_map;  // submodel node -> master node
};

/// Restriction of `model` to `keep` with every internal edge. Costs are
/// copied unchanged; `keep` is sorted before use.
InducedSubmodel induce_submodel(const GraphicalModel& model, std::vector<NodeId> keep);

/// Places `sub` into a labeling of `master_size` nodes via `node_map`; all
/// nodes outside the map receive `fill`.
PartialLabeling extend_partial(std::size_t master_size, const PartialLabeling& sub,
                               std::span<const NodeId> node_map, Label fill);

}  // namespace ghg
