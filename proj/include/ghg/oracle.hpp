#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ghg/graphical_model.hpp"

namespace ghg {

/// Refusal to enumerate more than this many labelings.
inline constexpr double kBruteForceGuard = 1e7;

struct OracleResult {
  Cost optimal_energy = Cost::infinity();
  std::vector<Labeling> optima;  // lexicographic order, node 0 most significant
  bool truncated = false;        // more optima existed than `cap`
  std::size_t cap = 0;
};

/// Exhaustive minimization. Throws ContractError over the guard.
OracleResult brute_force(const GraphicalModel& model, std::size_t cap = 1024);
/// Single-threaded reference of brute_force.
OracleResult brute_force_serial(const GraphicalModel& model, std::size_t cap = 1024);

/// Minimum energy over labelings that agree with every labeled node.
Cost constrained_minimum(const GraphicalModel& model, const PartialLabeling& partial);

/// True iff some optimal labeling agrees with every labeled node.
bool check_persistency(const GraphicalModel& model, const PartialLabeling& partial);
bool check_persistency(const GraphicalModel& model, const PartialLabeling& partial,
                       const OracleResult& oracle);

std::uint64_t splitmix64(std::uint64_t x);
/// Independent per-trial seed derived from a master seed.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(master ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

/// Random cost k/64 with k uniform in [lo, hi].
double dyadic(Rng& rng, int lo, int hi);

/// Binary model mixing submodular, supermodular, arbitrary, Potts-like and
/// hard-constraint edges. Labeling all-zero is always finite. Without
/// `hard_off_diagonal` infinite costs only appear in the (1,1) slot.
GraphicalModel random_binary_model(Rng& rng, std::size_t nodes, double edge_probability = 0.5,
                                   bool hard_off_diagonal = true);
/// Binary model in zero form; some (1,1) entries are infinite.
GraphicalModel random_zero_form_model(Rng& rng, std::size_t nodes, double edge_probability = 0.6);
/// Multi-label model on a random sparse graph; label 0 everywhere is finite.
GraphicalModel random_sparse_model(Rng& rng, std::size_t nodes, std::size_t max_labels,
                                   double edge_probability = 0.35);
/// Multi-label model on a random spanning tree.
GraphicalModel random_tree_model(Rng& rng, std::size_t nodes, std::size_t max_labels);

struct Prop1Trial {
  std::size_t nodes = 0;
  std::size_t kept = 0;  // |V'|
  double master_optimum = 0.0;
  double extended_energy = 0.0;
  bool passed = false;
};

struct Prop1Report {
  std::vector<Prop1Trial> trials;
  std::size_t passed() const;
};

/// Per trial: sample a zero-form model, brute-force an optimum, induce a
/// random superset of its label-1 nodes, brute-force the submodel and
/// compare the zero-extended energy with the master optimum.
Prop1Report verify_prop1(std::size_t trials, std::size_t min_nodes, std::size_t max_nodes,
                         std::uint64_t seed, double tolerance = 1e-12);

}  // namespace ghg
