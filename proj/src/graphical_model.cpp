#include "ghg/graphical_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ghg {

namespace {

std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

GraphicalModel::GraphicalModel(const std::vector<std::vector<double>>& unaries,
                               double pairwise_weight) {
  set_pairwise_weight(pairwise_weight);
  label_counts_.reserve(unaries.size());
  unary_offset_.reserve(unaries.size());
  for (const auto& u : unaries) {
    if (u.empty()) throw ContractError("GraphicalModel: node with no labels");
    unary_offset_.push_back(unary_data_.size());
    label_counts_.push_back(u.size());
    for (double v : u) {
      check_value(v);
      unary_data_.push_back(v);
    }
  }
  adjacency_.resize(unaries.size());
}

void GraphicalModel::check_value(double v) const {
  if (std::isnan(v) || v == -kInfinity) {
    throw ContractError("GraphicalModel: cost must be a real number or +inf");
  }
}

void GraphicalModel::set_pairwise_weight(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw ContractError("GraphicalModel: pairwise weight must be finite and >= 0");
  }
  beta_ = beta;
}

void GraphicalModel::set_unary(NodeId u, Label l, double value) {
  if (u >= node_count() || l >= label_counts_[u]) {
    throw ContractError("GraphicalModel::set_unary: index out of range");
  }
  check_value(value);
  unary_data_[unary_offset_[u] + l] = value;
}

std::optional<std::size_t> GraphicalModel::find_edge(NodeId a, NodeId b) const {
  auto it = edge_index_.find(pair_key(a, b));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t GraphicalModel::insert_edge(NodeId a, NodeId b) {
  if (a >= node_count() || b >= node_count()) {
    throw ContractError("GraphicalModel::add_edge: node out of range");
  }
  if (a == b) throw ContractError("GraphicalModel::add_edge: self-loop");
  if (!edge_index_.emplace(pair_key(a, b), edges_.size()).second) {
    throw ContractError("GraphicalModel::add_edge: duplicate edge {" + std::to_string(a) + "," +
                        std::to_string(b) + "}");
  }
  const NodeId u = std::min(a, b);
  const NodeId v = std::max(a, b);
  const std::size_t e = edges_.size();
  edges_.push_back({u, v});
  adjacency_[u].push_back({e, v, true});
  adjacency_[v].push_back({e, u, false});
  return e;
}

std::size_t GraphicalModel::add_edge(NodeId a, NodeId b, std::span<const double> table) {
  if (a >= node_count() || b >= node_count()) {
    throw ContractError("GraphicalModel::add_edge: node out of range");
  }
  const std::size_t la = label_counts_[a];
  const std::size_t lb = label_counts_[b];
  if (table.size() != la * lb) {
    throw ContractError("GraphicalModel::add_edge: table size does not match label counts");
  }
  for (double v : table) check_value(v);
  const std::size_t e = insert_edge(a, b);
  table_offset_.push_back(table_data_.size());
  if (a < b) {
    table_data_.insert(table_data_.end(), table.begin(), table.end());
  } else {
    // stored as [lb_canonical_u * la + la_canonical_v]
    for (std::size_t j = 0; j < lb; ++j)
      for (std::size_t i = 0; i < la; ++i) table_data_.push_back(table[i * lb + j]);
  }
  return e;
}

std::size_t GraphicalModel::add_lazy_edge(NodeId a, NodeId b) {
  const std::size_t e = insert_edge(a, b);
  table_offset_.push_back(kLazy);
  return e;
}

double GraphicalModel::pairwise(std::size_t e, Label lu, Label lv) const {
  const std::size_t off = table_offset_[e];
  if (off == kLazy) {
    if (!lazy_) throw ContractError("GraphicalModel: lazy edge without a pairwise callback");
    return lazy_(e, lu, lv);
  }
  return table_data_[off + lu * label_counts_[edges_[e].v] + lv];
}

double GraphicalModel::pairwise_oriented(std::size_t e, NodeId a, Label la, Label lb) const {
  return edges_[e].u == a ? pairwise(e, la, lb) : pairwise(e, lb, la);
}

void GraphicalModel::fill_pairwise(std::size_t e, std::span<double> out) const {
  const std::size_t lu = label_counts_[edges_[e].u];
  const std::size_t lv = label_counts_[edges_[e].v];
  if (out.size() != lu * lv) throw ContractError("fill_pairwise: output size mismatch");
  const std::size_t off = table_offset_[e];
  if (off != kLazy) {
    std::copy_n(table_data_.begin() + static_cast<std::ptrdiff_t>(off), lu * lv, out.begin());
    return;
  }
  for (Label a = 0; a < lu; ++a)
    for (Label b = 0; b < lv; ++b) out[a * lv + b] = pairwise(e, a, b);
}

void GraphicalModel::set_pairwise(std::size_t e, Label lu, Label lv, double value) {
  if (e >= edges_.size() || !is_materialized(e)) {
    throw ContractError("set_pairwise: edge missing or lazy");
  }
  check_value(value);
  table_data_[table_offset_[e] + lu * label_counts_[edges_[e].v] + lv] = value;
}

std::size_t GraphicalModel::reserve_tables() {
  std::size_t pending = 0;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (table_offset_[e] != kLazy) continue;
    table_offset_[e] = table_data_.size() + pending;
    pending += label_counts_[edges_[e].u] * label_counts_[edges_[e].v];
  }
  return pending;
}

void GraphicalModel::memoize_pairwise_serial() {
  std::vector<std::size_t> lazy_edges;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (table_offset_[e] == kLazy) lazy_edges.push_back(e);
  if (lazy_edges.empty()) return;
  if (!lazy_) throw ContractError("memoize_pairwise: lazy edges without a callback");
  const std::size_t base = table_data_.size();
  table_data_.resize(base + reserve_tables());
  for (std::size_t e : lazy_edges) {
    const std::size_t lv = label_counts_[edges_[e].v];
    for (Label a = 0; a < label_counts_[edges_[e].u]; ++a)
      for (Label b = 0; b < lv; ++b) {
        const double v = lazy_(e, a, b);
        check_value(v);
        table_data_[table_offset_[e] + a * lv + b] = v;
      }
  }
}

void GraphicalModel::memoize_pairwise() {
  std::vector<std::size_t> lazy_edges;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (table_offset_[e] == kLazy) lazy_edges.push_back(e);
  if (lazy_edges.empty()) return;
  if (!lazy_) throw ContractError("memoize_pairwise: lazy edges without a callback");
  const std::size_t base = table_data_.size();
  table_data_.resize(base + reserve_tables());
  const auto count = static_cast<std::ptrdiff_t>(lazy_edges.size());
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const std::size_t e = lazy_edges[static_cast<std::size_t>(i)];
    const std::size_t lv = label_counts_[edges_[e].v];
    for (Label a = 0; a < label_counts_[edges_[e].u]; ++a)
      for (Label b = 0; b < lv; ++b) {
        const double v = lazy_(e, a, b);
        bad = bad || std::isnan(v) || v == -kInfinity;
        table_data_[table_offset_[e] + a * lv + b] = v;
      }
  }
  if (bad) throw ContractError("GraphicalModel: cost must be a real number or +inf");
}

std::size_t PartialLabeling::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

std::vector<NodeId> PartialLabeling::nodes_with(Label label) const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] && *values_[i] == label) out.push_back(static_cast<NodeId>(i));
  return out;
}

PartialLabeling to_partial(const Labeling& l) {
  PartialLabeling p(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) p[i] = l[i];
  return p;
}

Cost evaluate_energy(const GraphicalModel& model, const Labeling& labeling) {
  if (labeling.size() != model.node_count()) {
    throw ContractError("evaluate_energy: labeling has " + std::to_string(labeling.size()) +
                        " entries, model has " + std::to_string(model.node_count()) + " nodes");
  }
  double unary_sum = 0.0;
  for (NodeId u = 0; u < model.node_count(); ++u) {
    if (labeling[u] >= model.label_count(u)) {
      throw ContractError("evaluate_energy: label out of range at node " + std::to_string(u));
    }
    unary_sum += model.unary(u, labeling[u]);
  }
  double pair_sum = 0.0;
  for (std::size_t e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.edge(e);
    pair_sum += model.pairwise(e, labeling[ed.u], labeling[ed.v]);
  }
  if (is_infinite(unary_sum) || is_infinite(pair_sum)) return Cost::infinity();
  return Cost(unary_sum + model.pairwise_weight() * pair_sum + model.constant());
}

InducedSubmodel induce_submodel(const GraphicalModel& model, std::vector<NodeId> keep) {
  if (keep.empty()) throw ContractError("induce_submodel: empty node set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.back() >= model.node_count()) {
    throw ContractError("induce_submodel: node outside the model");
  }
  constexpr NodeId kAbsent = static_cast<NodeId>(-1);
  std::vector<NodeId> local(model.node_count(), kAbsent);
  std::vector<std::vector<double>> unaries;
  unaries.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    local[keep[i]] = static_cast<NodeId>(i);
    auto un = model.unary(keep[i]);
    unaries.emplace_back(un.begin(), un.end());
  }
  InducedSubmodel out{GraphicalModel(unaries, model.pairwise_weight()), keep};
  std::vector<double> table;
  for (std::size_t e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.edge(e);
    if (local[ed.u] == kAbsent || local[ed.v] == kAbsent) continue;
    table.resize(model.label_count(ed.u) * model.label_count(ed.v));
    model.fill_pairwise(e, table);
    // keep is sorted, so local order preserves u < v
    out.model.add_edge(local[ed.u], local[ed.v], table);
  }
  return out;
}

PartialLabeling extend_partial(std::size_t master_size, const PartialLabeling& sub,
                               std::span<const NodeId> node_map, Label fill) {
  if (node_map.size() != sub.size()) {
    throw ContractError("extend_partial: node map and labeling sizes differ");
  }
  PartialLabeling out(master_size);
  for (std::size_t i = 0; i < master_size; ++i) out[i] = fill;
  for (std::size_t i = 0; i < node_map.size(); ++i) {
    if (node_map[i] >= master_size) throw ContractError("extend_partial: node map out of range");
    out[node_map[i]] = sub[i];
  }
  return out;
}

}  // namespace ghg
