#pragma once

#include <span>
#include <vector>

#include "alice/graph.hpp"

namespace alice {

/// Granularity exponent of density sketch modularity. CM-like as tau -> 0,
/// density modularity at tau = 1.
struct ModularityParams {
  double tau = 0.8;
};

// All variants share the numerator 2|E_C| - d_C^2 / (2|E|) and differ only in
// the normalisation. Counts are exact integers; the arithmetic is double.
// Each throws std::invalid_argument for an edgeless graph or empty community.

double classical_modularity(const AttributedGraph& g, const Community& c);
double density_modularity(const AttributedGraph& g, const Community& c);
double density_sketch_modularity(const AttributedGraph& g, const Community& c,
                                 ModularityParams p = {});

/// Same formulas from raw counts, used by extraction and the implication checks.
double modularity_numerator(std::size_t internal_edges, std::size_t degree_sum,
                            std::size_t total_edges);
double classical_modularity(std::size_t internal_edges, std::size_t degree_sum,
                            std::size_t total_edges);
double density_sketch_modularity(std::size_t size, std::size_t internal_edges,
                                 std::size_t degree_sum, std::size_t total_edges, double tau);

/// A two-sided community in a node-attribute bipartite graph.
struct BipartiteCommunity {
  std::vector<NodeId> u_nodes;
  std::vector<AttrId> l_nodes;
};

/// (1/|E_B|)(2|E_C| - d_U * d_L / |E_B|).
double bipartite_modularity(const BipartiteGraph& bg, const BipartiteCommunity& c);
double bipartite_modularity(std::size_t internal_edges, std::size_t u_degree_sum,
                            std::size_t l_degree_sum, std::size_t total_edges);

/// Outcome of an exhaustive implication check.
struct ImplicationCheck {
  bool holds = true;
  std::size_t cases = 0;            // pairs where the DSM premise fired
  std::size_t counterexamples = 0;  // of those, pairs where CM did not follow
  // First counterexample found, empty when none.
  std::vector<NodeId> witness_base;
  std::vector<NodeId> witness_other;
};

/// Which base communities C an implication check ranges over.
///
/// The implication only follows algebraically when the merged numerator is
/// nonnegative; with a negative-modularity base the DSM premise can fire
/// while CM decreases. `nonnegative_modularity` restricts C to
/// 2|E_C| - d_C^2/(2|E|) >= 0, where the implication is a theorem.
enum class BaseFilter { any, nonnegative_modularity };

/// Largest graph the exhaustive checks accept.
inline constexpr std::size_t kMaxExhaustiveNodes = 10;

/// Free-rider implication: over every pair of nonempty node sets (C, C*),
/// DSM(C u C*) >= DSM(C) must imply CM(C u C*) >= CM(C).
/// Throws std::invalid_argument when g has more than kMaxExhaustiveNodes nodes.
bool check_free_rider_implication(const AttributedGraph& g, double tau);
ImplicationCheck free_rider_report(const AttributedGraph& g, double tau,
                                   BaseFilter filter = BaseFilter::any);

/// Resolution-limit implication with community constraint "connected
/// induced subgraph": over disjoint connected C, C' whose union is
/// connected, DSM(C u C') >= DSM(C) must imply CM(C u C') >= CM(C).
bool check_resolution_limit_implication(const AttributedGraph& g, double tau);
ImplicationCheck resolution_limit_report(const AttributedGraph& g, double tau,
                                         BaseFilter filter = BaseFilter::any);

}  // namespace alice
