#pragma once

// Planted-partition attributed graphs and the plain-text dataset format.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "alice/graph.hpp"

namespace alice {

struct PlantedConfig {
  std::size_t nodes = 400;
  std::size_t communities = 8;
  double p_in = 0.2;
  double p_out = 0.01;
  std::size_t signature_attributes = 2;  // per community
  double signature_rate = 0.9;           // chance a member carries each signature attribute
  std::size_t noise_vocabulary = 40;
  std::size_t noise_per_node = 1;
  std::uint64_t seed = 1;
};

struct Dataset {
  AttributedGraph graph;
  std::vector<std::vector<NodeId>> communities;  // sorted members
};

/// Node tokens are "1".."n"; node i lands in community (i-1) * m / n.
/// Throws std::invalid_argument for probabilities outside [0, 1] or an
/// impossible layout.
Dataset generate_planted(const PlantedConfig& cfg);

/// "u v" per edge, tokens as in the graph.
void write_edges(std::ostream& out, const AttributedGraph& g);
/// "node<TAB>a,b,c" for every node, including attribute-free ones.
void write_attributes(std::ostream& out, const AttributedGraph& g);
/// One community per line, space separated tokens.
void write_communities(std::ostream& out, const AttributedGraph& g,
                       const std::vector<std::vector<NodeId>>& communities);

}  // namespace alice
