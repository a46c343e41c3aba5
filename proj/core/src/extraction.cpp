#include "alice/extraction.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "alice/log.hpp"
#include "alice/modularity.hpp"

namespace alice {

std::string_view to_string(Branch b) {
  return b == Branch::structure ? "structure" : "attribute";
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_tau(const ExtractionConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("extraction: tau must be positive");
  if ((cfg.max_hops && *cfg.max_hops < 1) || (cfg.attribute_max_hops && *cfg.attribute_max_hops < 1)) {
    throw std::invalid_argument("extraction: hop caps must be at least 1");
  }
}

bool hop_budget_left(const ExtractionConfig& cfg, std::size_t hop) {
  return !cfg.max_hops || hop < *cfg.max_hops;
}

bool attribute_budget_left(const ExtractionConfig& cfg, std::size_t hop) {
  return hop_budget_left(cfg, hop) && (!cfg.attribute_max_hops || hop < *cfg.attribute_max_hops);
}

// V_sub = V_sub u ball, kept sorted.
void merge_into(std::vector<NodeId>& acc, const std::vector<NodeId>& ball) {
  std::vector<NodeId> merged;
  merged.reserve(acc.size() + ball.size());
  std::set_union(acc.begin(), acc.end(), ball.begin(), ball.end(), std::back_inserter(merged));
  acc = std::move(merged);
}

}  // namespace

BranchResult structure_prune(const AttributedGraph& g, std::span<const NodeId> query_nodes,
                             const ExtractionConfig& cfg) {
  require_tau(cfg);
  if (query_nodes.empty()) throw std::invalid_argument("structure_prune: query nodes required");

  const std::size_t n = g.node_count();
  std::vector<char> in_ball(n, 0);
  std::vector<NodeId> ball;
  std::vector<NodeId> frontier;
  std::size_t internal_edges = 0;
  std::size_t degree_sum = 0;

  auto admit = [&](NodeId v) {
    in_ball[v] = 1;
    ball.push_back(v);
    frontier.push_back(v);
    degree_sum += g.degree(v);
    for (NodeId u : g.neighbors(v)) internal_edges += in_ball[u] && u != v;
  };

  for (NodeId q : query_nodes) {
    if (q >= n) throw std::out_of_range("structure_prune: query node " + std::to_string(q) + " not in graph");
    if (!in_ball[q]) admit(q);
  }

  BranchResult result;
  result.nodes = ball;
  std::sort(result.nodes.begin(), result.nodes.end());

  double best = kNegInf;
  std::size_t hop = 0;
  while (ball.size() < n && hop_budget_left(cfg, hop)) {
    // P <- P u N(v) for every v in Q; only the last frontier can contribute.
    std::vector<NodeId> previous;
    previous.swap(frontier);
    for (NodeId v : previous) {
      for (NodeId u : g.neighbors(v)) {
        if (!in_ball[u]) admit(u);
      }
    }
    if (frontier.empty()) break;  // fixpoint: the query's component is exhausted
    ++hop;

    const double mod =
        density_sketch_modularity(ball.size(), internal_edges, degree_sum, g.edge_count(), cfg.tau);
    result.trace.push_back({Branch::structure, hop, mod});
    if (mod > best) {
      best = mod;
      auto sorted_ball = ball;
      std::sort(sorted_ball.begin(), sorted_ball.end());
      merge_into(result.nodes, sorted_ball);
      result.best_hop = hop;
    }
  }
  return result;
}

BranchResult attribute_prune(const BipartiteGraph& bg, std::span<const AttrId> query_attrs,
                             const ExtractionConfig& cfg) {
  require_tau(cfg);
  BranchResult result;

  const std::size_t u_count = bg.u_count();
  const std::size_t total = u_count + bg.l_count();
  // Combined id space: U nodes first, then L nodes at u_count + l.
  std::vector<char> in_ball(total, 0);
  std::vector<std::size_t> frontier;
  std::size_t ball_size = 0;
  std::size_t internal_edges = 0;
  std::size_t u_degree_sum = 0;
  std::size_t l_degree_sum = 0;
  std::vector<NodeId> ball_u;

  auto admit_u = [&](NodeId u) {
    in_ball[u] = 1;
    ++ball_size;
    frontier.push_back(u);
    ball_u.push_back(u);
    u_degree_sum += bg.u_degree(u);
    for (AttrId l : bg.attributes_of(u)) internal_edges += in_ball[u_count + l];
  };
  auto admit_l = [&](AttrId l) {
    in_ball[u_count + l] = 1;
    ++ball_size;
    frontier.push_back(u_count + l);
    l_degree_sum += bg.l_degree(l);
    for (NodeId u : bg.holders_of(l)) internal_edges += in_ball[u];
  };

  for (AttrId a : query_attrs) {
    if (a >= bg.l_count()) {
      warn("query attribute id " + std::to_string(a) + " is not in the vocabulary; skipped");
      continue;
    }
    if (!in_ball[u_count + a]) admit_l(a);
  }
  if (ball_size == 0) return result;

  double best = kNegInf;
  std::size_t hop = 0;
  while (ball_size < total && attribute_budget_left(cfg, hop)) {
    std::vector<std::size_t> previous;
    previous.swap(frontier);
    for (std::size_t v : previous) {
      if (v < u_count) {
        for (AttrId l : bg.attributes_of(static_cast<NodeId>(v))) {
          if (!in_ball[u_count + l]) admit_l(l);
        }
      } else {
        for (NodeId u : bg.holders_of(static_cast<AttrId>(v - u_count))) {
          if (!in_ball[u]) admit_u(u);
        }
      }
    }
    if (frontier.empty()) break;
    ++hop;

    const double mod =
        bipartite_modularity(internal_edges, u_degree_sum, l_degree_sum, bg.edge_count());
    result.trace.push_back({Branch::attribute, hop, mod});
    if (mod > best) {
      best = mod;
      auto sorted_u = ball_u;
      std::sort(sorted_u.begin(), sorted_u.end());
      merge_into(result.nodes, sorted_u);
      result.best_hop = hop;
    }
  }
  return result;
}

ExtractionResult extract(const AttributedGraph& g, const BipartiteGraph& bg, const Query& query,
                         const ExtractionConfig& cfg) {
  if (query.nodes.empty()) throw std::invalid_argument("extract: query nodes required");
  auto structure = structure_prune(g, query.nodes, cfg);
  auto attribute = attribute_prune(bg, query.attributes, cfg);

  std::vector<NodeId> selected(query.nodes.begin(), query.nodes.end());
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  merge_into(selected, structure.nodes);
  merge_into(selected, attribute.nodes);

  ExtractionResult out{induced_subgraph(g, selected),
                       std::move(structure.nodes),
                       std::move(attribute.nodes),
                       structure.best_hop,
                       attribute.best_hop,
                       std::move(structure.trace)};
  out.modularity_trace.insert(out.modularity_trace.end(), attribute.trace.begin(),
                              attribute.trace.end());
  return out;
}

ExtractionResult extract(const AttributedGraph& g, const Query& query,
                         const ExtractionConfig& cfg) {
  return extract(g, build_bipartite(g), query, cfg);
}

}  // namespace alice
