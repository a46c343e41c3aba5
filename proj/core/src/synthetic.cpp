#include "alice/synthetic.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace alice {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must be a probability in [0, 1]");
  }
}

}  // namespace

Dataset generate_planted(const PlantedConfig& cfg) {
  require_probability(cfg.p_in, "p_in");
  require_probability(cfg.p_out, "p_out");
  require_probability(cfg.signature_rate, "signature_rate");
  if (cfg.communities == 0 || cfg.nodes < cfg.communities) {
    throw std::invalid_argument("need at least one node per community");
  }
  if (cfg.noise_per_node > cfg.noise_vocabulary) {
    throw std::invalid_argument("noise_per_node exceeds the noise vocabulary");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const std::size_t n = cfg.nodes;
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i * cfg.communities / n;

  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(std::to_string(i + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = label[i] == label[j] ? cfg.p_in : cfg.p_out;
      if (coin(rng) < p) b.add_edge(std::to_string(i + 1), std::to_string(j + 1));
    }
  }

  std::vector<std::size_t> noise(cfg.noise_vocabulary);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string token = std::to_string(i + 1);
    for (std::size_t s = 0; s < cfg.signature_attributes; ++s) {
      if (coin(rng) < cfg.signature_rate) {
        b.add_attribute(token, "c" + std::to_string(label[i]) + "s" + std::to_string(s));
      }
    }
    for (std::size_t k = 0; k < noise.size(); ++k) noise[k] = k;
    for (std::size_t k = 0; k < cfg.noise_per_node; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, noise.size() - 1);
      std::swap(noise[k], noise[pick(rng)]);
      b.add_attribute(token, "noise" + std::to_string(noise[k]));
    }
  }

  Dataset d{std::move(b).build(), std::vector<std::vector<NodeId>>(cfg.communities)};
  for (std::size_t i = 0; i < n; ++i) d.communities[label[i]].push_back(static_cast<NodeId>(i));
  return d;
}

void write_edges(std::ostream& out, const AttributedGraph& g) {
  for (auto [u, v] : g.edges()) out << g.node_token(u) << ' ' << g.node_token(v) << '\n';
}

void write_attributes(std::ostream& out, const AttributedGraph& g) {
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out << g.node_token(v) << '\t';
    bool first = true;
    for (AttrId a : g.attributes(v)) {
      if (!first) out << ',';
      out << g.attribute_token(a);
      first = false;
    }
    out << '\n';
  }
}

void write_communities(std::ostream& out, const AttributedGraph& g,
                       const std::vector<std::vector<NodeId>>& communities) {
  for (const auto& c : communities) {
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << g.node_token(c[i]);
    out << '\n';
  }
}

}  // namespace alice
