#include "alice/modularity.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace alice {

namespace {

void require_edges(std::size_t total_edges) {
  if (total_edges == 0) throw std::invalid_argument("modularity: graph has no edges");
}

void require_members(const Community& c) {
  if (c.members.empty()) throw std::invalid_argument("modularity: empty community");
}

// Per-subset counts for graphs small enough to enumerate. Scaled numerator
// 4|E||E_C| - d_C^2 is an exact integer: CM comparisons are exact.
struct SubsetTable {
  std::size_t total_edges = 0;
  std::vector<std::int64_t> scaled_numerator;
  std::vector<int> size;
  std::vector<char> connected;
};

SubsetTable tabulate_subsets(const AttributedGraph& g) {
  const std::size_t n = g.node_count();
  if (n > kMaxExhaustiveNodes) {
    throw std::invalid_argument("implication check: graph has " + std::to_string(n) +
                                " nodes, at most " + std::to_string(kMaxExhaustiveNodes) +
                                " allowed");
  }
  require_edges(g.edge_count());
  const std::uint32_t full = 1u << n;
  std::vector<std::uint32_t> nbr_mask(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : g.neighbors(v)) nbr_mask[v] |= 1u << u;
  }

  SubsetTable t;
  t.total_edges = g.edge_count();
  t.scaled_numerator.resize(full);
  t.size.resize(full);
  t.connected.resize(full);
  const auto m = static_cast<std::int64_t>(g.edge_count());
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    std::int64_t twice_internal = 0;
    std::int64_t degree_sum = 0;
    for (NodeId v = 0; v < n; ++v) {
      if (!(mask >> v & 1u)) continue;
      degree_sum += static_cast<std::int64_t>(g.degree(v));
      twice_internal += std::popcount(nbr_mask[v] & mask);
    }
    t.scaled_numerator[mask] = 2 * m * twice_internal - degree_sum * degree_sum;
    t.size[mask] = std::popcount(mask);

    if (mask == 0) continue;
    std::uint32_t seen = mask & (~mask + 1);
    std::uint32_t frontier = seen;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f; f &= f - 1) {
        next |= nbr_mask[std::countr_zero(f)];
      }
      next &= mask & ~seen;
      seen |= next;
      frontier = next;
    }
    t.connected[mask] = seen == mask;
  }
  return t;
}

// Premise DSM(U) >= DSM(C) in scaled form: N(U) / |U|^tau >= N(C) / |C|^tau.
bool dsm_not_worse(const SubsetTable& t, std::uint32_t merged, std::uint32_t base, double tau) {
  const double lhs = static_cast<double>(t.scaled_numerator[merged]) *
                     std::pow(static_cast<double>(t.size[base]), tau);
  const double rhs = static_cast<double>(t.scaled_numerator[base]) *
                     std::pow(static_cast<double>(t.size[merged]), tau);
  return lhs >= rhs;
}

std::vector<NodeId> mask_nodes(std::uint32_t mask) {
  std::vector<NodeId> out;
  for (; mask; mask &= mask - 1) out.push_back(static_cast<NodeId>(std::countr_zero(mask)));
  return out;
}

void tally(ImplicationCheck& report, const SubsetTable& t, std::uint32_t merged,
           std::uint32_t base, double tau) {
  if (!dsm_not_worse(t, merged, base, tau)) return;
  ++report.cases;
  if (t.scaled_numerator[merged] < t.scaled_numerator[base]) {
    if (report.holds) {
      report.witness_base = mask_nodes(base);
      report.witness_other = mask_nodes(merged & ~base);
    }
    ++report.counterexamples;
    report.holds = false;
  }
}

bool base_admitted(const SubsetTable& t, std::uint32_t base, BaseFilter filter) {
  return filter == BaseFilter::any || t.scaled_numerator[base] >= 0;
}

void require_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be a positive finite number");
  }
}

}  // namespace

double modularity_numerator(std::size_t internal_edges, std::size_t degree_sum,
                            std::size_t total_edges) {
  require_edges(total_edges);
  const double d = static_cast<double>(degree_sum);
  return 2.0 * static_cast<double>(internal_edges) - d * d / (2.0 * static_cast<double>(total_edges));
}

double classical_modularity(std::size_t internal_edges, std::size_t degree_sum,
                            std::size_t total_edges) {
  return modularity_numerator(internal_edges, degree_sum, total_edges) /
         (2.0 * static_cast<double>(total_edges));
}

double density_sketch_modularity(std::size_t size, std::size_t internal_edges,
                                 std::size_t degree_sum, std::size_t total_edges, double tau) {
  require_tau(tau);
  if (size == 0) throw std::invalid_argument("modularity: empty community");
  return modularity_numerator(internal_edges, degree_sum, total_edges) /
         (2.0 * std::pow(static_cast<double>(size), tau));
}

double classical_modularity(const AttributedGraph& g, const Community& c) {
  require_members(c);
  return classical_modularity(c.internal_edges, c.degree_sum, g.edge_count());
}

double density_modularity(const AttributedGraph& g, const Community& c) {
  require_members(c);
  return modularity_numerator(c.internal_edges, c.degree_sum, g.edge_count()) /
         (2.0 * static_cast<double>(c.size()));
}

double density_sketch_modularity(const AttributedGraph& g, const Community& c,
                                 ModularityParams p) {
  require_members(c);
  return density_sketch_modularity(c.size(), c.internal_edges, c.degree_sum, g.edge_count(),
                                   p.tau);
}

double bipartite_modularity(std::size_t internal_edges, std::size_t u_degree_sum,
                            std::size_t l_degree_sum, std::size_t total_edges) {
  if (total_edges == 0) throw std::invalid_argument("bipartite modularity: no edges");
  const double e = static_cast<double>(total_edges);
  return (2.0 * static_cast<double>(internal_edges) -
          static_cast<double>(u_degree_sum) * static_cast<double>(l_degree_sum) / e) /
         e;
}

double bipartite_modularity(const BipartiteGraph& bg, const BipartiteCommunity& c) {
  if (bg.edge_count() == 0) throw std::invalid_argument("bipartite modularity: no edges");
  if (c.u_nodes.empty() && c.l_nodes.empty()) {
    throw std::invalid_argument("bipartite modularity: empty community");
  }
  std::vector<char> in_l(bg.l_count(), 0);
  std::size_t l_degree_sum = 0;
  for (AttrId l : c.l_nodes) {
    if (!in_l.at(l)) {
      in_l[l] = 1;
      l_degree_sum += bg.l_degree(l);
    }
  }
  std::vector<char> in_u(bg.u_count(), 0);
  std::size_t u_degree_sum = 0;
  std::size_t internal = 0;
  for (NodeId u : c.u_nodes) {
    if (in_u.at(u)) continue;
    in_u[u] = 1;
    u_degree_sum += bg.u_degree(u);
    for (AttrId l : bg.attributes_of(u)) internal += in_l[l];
  }
  return bipartite_modularity(internal, u_degree_sum, l_degree_sum, bg.edge_count());
}

ImplicationCheck free_rider_report(const AttributedGraph& g, double tau, BaseFilter filter) {
  require_tau(tau);
  const auto t = tabulate_subsets(g);
  const std::uint32_t full = static_cast<std::uint32_t>(t.size.size());
  ImplicationCheck report;
  for (std::uint32_t base = 1; base < full; ++base) {
    if (!base_admitted(t, base, filter)) continue;
    for (std::uint32_t other = 1; other < full; ++other) {
      tally(report, t, base | other, base, tau);
    }
  }
  return report;
}

bool check_free_rider_implication(const AttributedGraph& g, double tau) {
  return free_rider_report(g, tau).holds;
}

ImplicationCheck resolution_limit_report(const AttributedGraph& g, double tau,
                                         BaseFilter filter) {
  require_tau(tau);
  const auto t = tabulate_subsets(g);
  const std::uint32_t full = static_cast<std::uint32_t>(t.size.size());
  ImplicationCheck report;
  for (std::uint32_t base = 1; base < full; ++base) {
    if (!t.connected[base] || !base_admitted(t, base, filter)) continue;
    const std::uint32_t rest = (full - 1) & ~base;
    // Nonempty submasks of the complement keep C and C' disjoint.
    for (std::uint32_t other = rest; other; other = (other - 1) & rest) {
      if (!t.connected[other] || !t.connected[base | other]) continue;
      tally(report, t, base | other, base, tau);
    }
  }
  return report;
}

bool check_resolution_limit_implication(const AttributedGraph& g, double tau) {
  return resolution_limit_report(g, tau).holds;
}

}  // namespace alice
