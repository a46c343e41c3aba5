#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "alice/graph.hpp"

namespace alice::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Ten-node citation graph with six attributes; tokens "1".."10" map to ids 0..9.
inline AttributedGraph citation_graph() {
  const std::string dir = ALICE_TEST_DATA;
  return AttributedGraph::ingest(read_file(dir + "/citation.edges"), read_file(dir + "/citation.attrs"));
}

inline NodeId id(const AttributedGraph& g, const std::string& token) { return g.find_node(token).value(); }

inline std::vector<NodeId> ids(const AttributedGraph& g, std::initializer_list<const char*> tokens) {
  std::vector<NodeId> out;
  for (const char* t : tokens) out.push_back(id(g, t));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> tokens(const AttributedGraph& g, const std::vector<NodeId>& v) {
  std::vector<std::string> out;
  for (NodeId x : v) out.push_back(g.node_token(x));
  std::sort(out.begin(), out.end());
  return out;
}

// G(n, p) over tokens "0".."n-1"; every node present. When `connected` a
// random spanning tree is laid down first. Attributes drawn from a small pool.
inline AttributedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng, bool connected = false,
                                    std::size_t attr_pool = 4) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(std::to_string(i));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (connected) {
    for (std::size_t i = 1; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> parent(0, i - 1);
      b.add_edge(std::to_string(i), std::to_string(parent(rng)));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng) < p) b.add_edge(std::to_string(i), std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < attr_pool; ++a) {
      if (coin(rng) < 0.4) b.add_attribute(std::to_string(i), "a" + std::to_string(a));
    }
  }
  return std::move(b).build();
}

}  // namespace alice::testing
