#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "alice/graph.hpp"
#include "alice/query.hpp"

namespace alice {

struct ExtractionConfig {
  double tau = 0.8;
  /// Upper bound on expansion rounds per branch. Unset means expand until the
  /// ball covers every node or stops growing.
  std::optional<std::size_t> max_hops;
  /// Extra bound for the attribute branch only. Bipartite modularity peaks
  /// at 1 on a whole connected bipartite graph, so an uncapped attribute
  /// expansion ends up holding every attributed node of the component.
  std::optional<std::size_t> attribute_max_hops;
};

enum class Branch { structure, attribute };
std::string_view to_string(Branch b);

struct TracePoint {
  Branch branch;
  std::size_t hop;
  double modularity;
};

struct BranchResult {
  std::vector<NodeId> nodes;  // sorted
  std::vector<TracePoint> trace;
  std::size_t best_hop = 0;   // 0 when no hop improved on the seed
};

struct ExtractionResult {
  CandidateSubgraph candidate;
  std::vector<NodeId> structure_nodes;
  std::vector<NodeId> attribute_nodes;
  std::size_t best_struct_hop = 0;
  std::size_t best_attr_hop = 0;
  std::vector<TracePoint> modularity_trace;  // structure points first
};

/// Structure-based pruning: grows the k-hop ball around all query nodes at
/// once and keeps every ball whose density sketch modularity strictly beats
/// the best seen so far.
BranchResult structure_prune(const AttributedGraph& g, std::span<const NodeId> query_nodes,
                             const ExtractionConfig& cfg);

/// Attribute-based pruning on the node-attribute bipartite graph, scored by
/// bipartite modularity. Returns only graph (U-side) nodes. Attribute ids
/// outside the vocabulary are skipped with a warning.
BranchResult attribute_prune(const BipartiteGraph& bg, std::span<const AttrId> query_attrs,
                             const ExtractionConfig& cfg);

ExtractionResult extract(const AttributedGraph& g, const BipartiteGraph& bg, const Query& query,
                         const ExtractionConfig& cfg);
ExtractionResult extract(const AttributedGraph& g, const Query& query,
                         const ExtractionConfig& cfg);

}  // namespace alice
