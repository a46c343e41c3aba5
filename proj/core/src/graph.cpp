#include "alice/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace alice {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Id>
std::vector<std::size_t> build_csr(std::vector<std::vector<Id>>& rows, std::vector<Id>& flat) {
  std::vector<std::size_t> offsets{0};
  offsets.reserve(rows.size() + 1);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    flat.insert(flat.end(), row.begin(), row.end());
    offsets.push_back(flat.size());
  }
  return offsets;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

// ---------------------------------------------------------------------------
// GraphBuilder

NodeId GraphBuilder::add_node(std::string_view token) {
  auto [it, inserted] = node_index_.try_emplace(std::string(token), static_cast<NodeId>(tokens_.size()));
  if (inserted) {
    tokens_.emplace_back(token);
    adj_.emplace_back();
    attrs_.emplace_back();
  }
  return it->second;
}

AttrId GraphBuilder::add_attribute_token(std::string_view token) {
  auto [it, inserted] =
      attr_index_.try_emplace(std::string(token), static_cast<AttrId>(attr_tokens_.size()));
  if (inserted) attr_tokens_.emplace_back(token);
  return it->second;
}

bool GraphBuilder::add_edge(std::string_view a, std::string_view b) {
  const NodeId u = add_node(a);
  const NodeId v = add_node(b);
  if (u == v) return false;
  auto& nu = adj_[u];
  if (std::find(nu.begin(), nu.end(), v) != nu.end()) return false;
  nu.push_back(v);
  adj_[v].push_back(u);
  return true;
}

void GraphBuilder::add_attribute(std::string_view node, std::string_view attr) {
  const NodeId v = add_node(node);
  const AttrId a = add_attribute_token(attr);
  auto& list = attrs_[v];
  if (std::find(list.begin(), list.end(), a) == list.end()) list.push_back(a);
}

AttributedGraph GraphBuilder::build() && {
  AttributedGraph g;
  g.adj_offsets_ = build_csr(adj_, g.adj_);
  g.attr_offsets_ = build_csr(attrs_, g.attrs_);
  g.edge_count_ = g.adj_.size() / 2;
  g.tokens_ = std::move(tokens_);
  g.attr_tokens_ = std::move(attr_tokens_);
  g.node_index_ = std::move(node_index_);
  g.attr_index_ = std::move(attr_index_);
  return g;
}

// ---------------------------------------------------------------------------
// AttributedGraph

AttributedGraph AttributedGraph::ingest(std::istream& edge_lines, std::istream& attr_lines) {
  GraphBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(edge_lines, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tokens = split_ws(line);
    if (tokens.size() != 2) {
      throw ParseError(line_no, "edge line must hold exactly two node tokens, got " +
                                    std::to_string(tokens.size()));
    }
    builder.add_edge(tokens[0], tokens[1]);
  }

  line_no = 0;
  while (std::getline(attr_lines, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const std::string_view view(line);
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(line_no, "attribute line must be 'node<TAB>attr1,attr2,...'");
    }
    const auto node = trim(view.substr(0, tab));
    if (node.empty() || split_ws(node).size() != 1) {
      throw ParseError(line_no, "attribute line has an invalid node token");
    }
    builder.add_node(node);
    auto rest = view.substr(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto tok = trim(rest.substr(0, comma));
      if (!tok.empty()) builder.add_attribute(node, tok);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return std::move(builder).build();
}

AttributedGraph AttributedGraph::ingest(std::string_view edge_text, std::string_view attr_text) {
  std::istringstream edges{std::string(edge_text)};
  std::istringstream attrs{std::string(attr_text)};
  return ingest(edges, attrs);
}

std::span<const NodeId> AttributedGraph::neighbors(NodeId v) const {
  if (v >= node_count()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
  return {adj_.data() + adj_offsets_[v], adj_offsets_[v + 1] - adj_offsets_[v]};
}

bool AttributedGraph::has_edge(NodeId u, NodeId v) const {
  const auto n = neighbors(u);
  return std::binary_search(n.begin(), n.end(), v);
}

std::span<const AttrId> AttributedGraph::attributes(NodeId v) const {
  if (v >= node_count()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
  return {attrs_.data() + attr_offsets_[v], attr_offsets_[v + 1] - attr_offsets_[v]};
}

bool AttributedGraph::has_attribute(NodeId v, AttrId a) const {
  const auto list = attributes(v);
  return std::binary_search(list.begin(), list.end(), a);
}

std::optional<NodeId> AttributedGraph::find_node(std::string_view token) const {
  const auto it = node_index_.find(std::string(token));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<AttrId> AttributedGraph::find_attribute(std::string_view token) const {
  const auto it = attr_index_.find(std::string(token));
  if (it == attr_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<NodeId, NodeId>> AttributedGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Community

Community make_community(const AttributedGraph& g, std::vector<NodeId> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  Community c;
  std::vector<char> in(g.node_count(), 0);
  for (NodeId v : members) {
    if (v >= g.node_count()) {
      throw std::out_of_range("community member " + std::to_string(v) + " not in graph");
    }
    in[v] = 1;
  }
  std::size_t twice_internal = 0;
  for (NodeId v : members) {
    const auto nbrs = g.neighbors(v);
    c.degree_sum += nbrs.size();
    for (NodeId u : nbrs) twice_internal += in[u];
  }
  c.internal_edges = twice_internal / 2;
  c.members = std::move(members);
  return c;
}

// ---------------------------------------------------------------------------
// BipartiteGraph

std::span<const AttrId> BipartiteGraph::attributes_of(NodeId u) const {
  if (u >= u_count()) throw std::out_of_range("U id out of range");
  return {u_adj_.data() + u_offsets_[u], u_offsets_[u + 1] - u_offsets_[u]};
}

std::span<const NodeId> BipartiteGraph::holders_of(AttrId l) const {
  if (l >= l_count()) throw std::out_of_range("L id out of range");
  return {l_adj_.data() + l_offsets_[l], l_offsets_[l + 1] - l_offsets_[l]};
}

BipartiteGraph build_bipartite(const AttributedGraph& g) {
  BipartiteGraph bg;
  std::vector<std::vector<NodeId>> holders(g.attribute_count());
  bg.u_offsets_.reserve(g.node_count() + 1);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (AttrId a : g.attributes(u)) {
      bg.u_adj_.push_back(a);
      holders[a].push_back(u);
    }
    bg.u_offsets_.push_back(bg.u_adj_.size());
  }
  bg.l_offsets_ = build_csr(holders, bg.l_adj_);
  return bg;
}

// ---------------------------------------------------------------------------
// CandidateSubgraph

std::optional<NodeId> CandidateSubgraph::to_local(NodeId global) const {
  const auto it = to_local_.find(global);
  if (it == to_local_.end()) return std::nullopt;
  return it->second;
}

std::span<const NodeId> CandidateSubgraph::neighbors(NodeId local) const {
  if (local >= node_count()) throw std::out_of_range("local id out of range");
  return {adj_.data() + adj_offsets_[local], adj_offsets_[local + 1] - adj_offsets_[local]};
}

std::span<const AttrId> CandidateSubgraph::attributes(NodeId local) const {
  if (local >= node_count()) throw std::out_of_range("local id out of range");
  return {attrs_.data() + attr_offsets_[local], attr_offsets_[local + 1] - attr_offsets_[local]};
}

CandidateSubgraph induced_subgraph(const AttributedGraph& g, std::vector<NodeId> nodes) {
  if (nodes.empty()) throw std::invalid_argument("induced_subgraph: empty node set");
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.back() >= g.node_count()) {
    throw std::out_of_range("induced_subgraph: node " + std::to_string(nodes.back()) +
                            " not in graph");
  }

  CandidateSubgraph sub;
  sub.to_local_.reserve(nodes.size());
  for (NodeId i = 0; i < nodes.size(); ++i) sub.to_local_.emplace(nodes[i], i);

  for (NodeId global : nodes) {
    const auto nbrs = g.neighbors(global);
    sub.host_degree_sum_ += nbrs.size();
    for (NodeId u : nbrs) {
      if (const auto it = sub.to_local_.find(u); it != sub.to_local_.end()) {
        sub.adj_.push_back(it->second);
      }
    }
    // Global neighbor lists are sorted and local ids preserve order.
    sub.adj_offsets_.push_back(sub.adj_.size());
    const auto attrs = g.attributes(global);
    sub.attrs_.insert(sub.attrs_.end(), attrs.begin(), attrs.end());
    sub.attr_offsets_.push_back(sub.attrs_.size());
  }
  sub.to_global_ = std::move(nodes);
  return sub;
}

// ---------------------------------------------------------------------------
// Traversal

std::vector<NodeId> k_hop_frontier(const AttributedGraph& g, std::span<const NodeId> seeds,
                                   std::size_t k) {
  std::vector<std::size_t> dist(g.node_count(), static_cast<std::size_t>(-1));
  std::deque<NodeId> queue;
  for (NodeId s : seeds) {
    if (s >= g.node_count()) {
      throw std::out_of_range("k_hop_frontier: unknown seed " + std::to_string(s));
    }
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  std::vector<NodeId> out;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    out.push_back(v);
    if (dist[v] == k) continue;
    for (NodeId u : g.neighbors(v)) {
      if (dist[u] == static_cast<std::size_t>(-1)) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<NodeId>> read_communities(std::istream& in, const AttributedGraph& g) {
  std::vector<std::vector<NodeId>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::vector<NodeId> members;
    for (auto tok : split_ws(line)) {
      const auto id = g.find_node(tok);
      if (!id) throw ParseError(line_no, "unknown node token '" + std::string(tok) + "'");
      members.push_back(*id);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

}  // namespace alice
