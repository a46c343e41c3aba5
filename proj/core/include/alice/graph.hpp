#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace alice {

using NodeId = std::uint32_t;
using AttrId = std::uint32_t;

/// Thrown on malformed edge/attribute/community input. Carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Undirected simple graph with per-node attribute sets.
///
/// Node and attribute ids are dense and assigned in first-appearance order
/// during ingestion. Adjacency and attribute lists are stored in CSR form
/// with each row sorted ascending. Immutable once built.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  /// Parses an edge list and an attribute list.
  ///
  /// Edge lines hold two whitespace-separated tokens; attribute lines hold
  /// `node<TAB>a1,a2,...`. Blank lines and lines starting with '#' are
  /// skipped. Self-loops and duplicate edges are dropped; nodes that only
  /// occur in the attribute list become isolated nodes.
  static AttributedGraph ingest(std::istream& edge_lines, std::istream& attr_lines);
  static AttributedGraph ingest(std::string_view edge_text, std::string_view attr_text);

  std::size_t node_count() const noexcept { return tokens_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t attribute_count() const noexcept { return attr_tokens_.size(); }

  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }
  bool has_edge(NodeId u, NodeId v) const;

  std::span<const AttrId> attributes(NodeId v) const;
  bool has_attribute(NodeId v, AttrId a) const;

  const std::string& node_token(NodeId v) const { return tokens_.at(v); }
  const std::string& attribute_token(AttrId a) const { return attr_tokens_.at(a); }
  std::optional<NodeId> find_node(std::string_view token) const;
  std::optional<AttrId> find_attribute(std::string_view token) const;

  /// Every undirected edge once, as (u, v) with u < v, sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

 private:
  friend class GraphBuilder;

  std::vector<std::size_t> adj_offsets_{0};
  std::vector<NodeId> adj_;
  std::vector<std::size_t> attr_offsets_{0};
  std::vector<AttrId> attrs_;
  std::vector<std::string> tokens_;
  std::vector<std::string> attr_tokens_;
  std::unordered_map<std::string, NodeId> node_index_;
  std::unordered_map<std::string, AttrId> attr_index_;
  std::size_t edge_count_ = 0;
};

/// Incremental construction of an AttributedGraph from tokens.
class GraphBuilder {
 public:
  NodeId add_node(std::string_view token);
  AttrId add_attribute_token(std::string_view token);
  /// Returns false when the edge was a self-loop or duplicate.
  bool add_edge(std::string_view a, std::string_view b);
  void add_attribute(std::string_view node, std::string_view attr);
  AttributedGraph build() &&;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::string> attr_tokens_;
  std::unordered_map<std::string, NodeId> node_index_;
  std::unordered_map<std::string, AttrId> attr_index_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::vector<AttrId>> attrs_;
};

/// Node set with the counts every modularity variant needs.
struct Community {
  std::vector<NodeId> members;  // sorted, unique
  std::size_t internal_edges = 0;
  std::size_t degree_sum = 0;

  std::size_t size() const noexcept { return members.size(); }
};

/// Builds a Community over `g`, counting |E_C| and d_C exactly.
/// Throws std::out_of_range for ids outside g.
Community make_community(const AttributedGraph& g, std::vector<NodeId> members);

/// Node-attribute incidence graph. U ids are graph node ids, L ids are
/// attribute ids.
class BipartiteGraph {
 public:
  std::size_t u_count() const noexcept { return u_offsets_.size() - 1; }
  std::size_t l_count() const noexcept { return l_offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return u_adj_.size(); }

  std::span<const AttrId> attributes_of(NodeId u) const;
  std::span<const NodeId> holders_of(AttrId l) const;
  std::size_t u_degree(NodeId u) const { return attributes_of(u).size(); }
  std::size_t l_degree(AttrId l) const { return holders_of(l).size(); }

 private:
  friend BipartiteGraph build_bipartite(const AttributedGraph& g);

  std::vector<std::size_t> u_offsets_{0};
  std::vector<AttrId> u_adj_;
  std::vector<std::size_t> l_offsets_{0};
  std::vector<NodeId> l_adj_;
};

BipartiteGraph build_bipartite(const AttributedGraph& g);

/// Induced subgraph with a dense local numbering.
///
/// Local ids follow ascending global id order.
class CandidateSubgraph {
 public:
  std::size_t node_count() const noexcept { return to_global_.size(); }
  std::size_t edge_count() const noexcept { return adj_.size() / 2; }

  NodeId to_global(NodeId local) const { return to_global_.at(local); }
  std::optional<NodeId> to_local(NodeId global) const;
  std::span<const NodeId> global_ids() const noexcept { return to_global_; }

  std::span<const NodeId> neighbors(NodeId local) const;
  std::size_t degree(NodeId local) const { return neighbors(local).size(); }
  /// Attribute ids (global vocabulary) of a local node.
  std::span<const AttrId> attributes(NodeId local) const;
  /// Degree sum of the member nodes measured in the host graph.
  std::size_t host_degree_sum() const noexcept { return host_degree_sum_; }

 private:
  friend CandidateSubgraph induced_subgraph(const AttributedGraph& g,
                                            std::vector<NodeId> nodes);

  std::vector<NodeId> to_global_;
  std::unordered_map<NodeId, NodeId> to_local_;
  std::vector<std::size_t> adj_offsets_{0};
  std::vector<NodeId> adj_;
  std::vector<std::size_t> attr_offsets_{0};
  std::vector<AttrId> attrs_;
  std::size_t host_degree_sum_ = 0;
};

/// Throws std::invalid_argument on an empty node set, std::out_of_range on
/// unknown ids.
CandidateSubgraph induced_subgraph(const AttributedGraph& g, std::vector<NodeId> nodes);

/// All nodes within `k` hops of any seed, seeds included. Sorted.
std::vector<NodeId> k_hop_frontier(const AttributedGraph& g, std::span<const NodeId> seeds,
                                   std::size_t k);

/// Parses a community file: one community per line, whitespace-separated
/// node tokens. Unknown tokens raise ParseError.
std::vector<std::vector<NodeId>> read_communities(std::istream& in, const AttributedGraph& g);

}  // namespace alice
