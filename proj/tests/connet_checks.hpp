#pragma once

// Checks shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "alice/connet.hpp"
#include "alice/eval.hpp"
#include "alice/synthetic.hpp"
#include "gradcheck.hpp"

namespace alice::testing {

inline AttributedGraph graph_from_edges(const std::string& edges, const std::string& attrs = "") {
  return AttributedGraph::ingest(edges, attrs);
}

inline CandidateSubgraph whole(const AttributedGraph& g) {
  std::vector<NodeId> all(g.node_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
  return induced_subgraph(g, all);
}

// Max relative error between reverse mode and central differences of
// L_b + alpha L_w + beta L_m over every parameter, critic included, on a
// 6-node candidate with d = 4 and two layers. Dropout runs in train mode with
// the mask stream replayed for every evaluation.
inline double composite_gradient_error(std::uint64_t seed) {
  const AttributedGraph g = graph_from_edges("1 2\n2 3\n3 1\n3 4\n4 5\n5 6\n4 6\n",
                                             "1\tx,y\n2\tx\n3\ty\n4\tz\n5\tz,x\n6\ty\n");
  const CandidateSubgraph sub = whole(g);
  Query q;
  q.nodes = {*g.find_node("1")};
  q.attributes = {*g.find_attribute("x")};
  q.mode = QueryMode::AFN;
  const NodeFeatures f = init_features(sub, q);
  const Matrix adj = adjacency_matrix(sub);
  const std::vector<double> truth = {1, 1, 1, 0, 0, 0};

  ConNetModel model({4, 2, 0.3}, 0.5, seed);
  // Move epsilon off zero and critic weights off the tiny clip box so every
  // term has a gradient of ordinary size.
  ad::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto& layer : model.layers()) layer.epsilon.values()(0, 0) = 0.25;
  for (ad::Tensor* t : model.critic_parameters()) *t = random_tensor(t->rows(), t->cols(), rng, -0.5, 0.5);
  for (auto& nt : model.named_parameters()) {
    if (nt.name.find(".b") != std::string::npos) *nt.tensor = random_tensor(nt.tensor->rows(), nt.tensor->cols(), rng, -0.1, 0.1);
  }

  std::vector<ad::Tensor*> params;
  for (auto& nt : model.named_parameters()) params.push_back(nt.tensor);
  const double alpha = 0.1, beta = 0.1;
  auto loss = [&](ad::Tape& tape) {
    ad::Rng mask(seed + 1);
    auto fwd = forward(model, tape, f, adj, Mode::train, mask);
    ad::Var total = loss_bce(fwd.scores, truth);
    total = ad::add(total, ad::scale(loss_wasserstein(model.critic(), tape, fwd.structure, fwd.attribute), alpha));
    total = ad::add(total, ad::scale(loss_local(fwd.combined, tape.constant(adj)), beta));
    return total;
  };
  return gradient_check(params, loss).max_relative_error;
}

// Row multiset distance: rows sorted lexicographically, then the max-abs
// entry difference. Zero iff the multisets agree.
inline double multiset_gap(const Matrix& a, const Matrix& b) {
  auto rows = [](const Matrix& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
    for (ad::Index r = 0; r < m.rows(); ++r) {
      out[r].resize(static_cast<std::size_t>(m.cols()));
      for (ad::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  const auto ra = rows(a), rb = rows(b);
  double gap = 0.0;
  for (std::size_t r = 0; r < ra.size(); ++r) {
    for (std::size_t c = 0; c < ra[r].size(); ++c) gap = std::max(gap, std::abs(ra[r][c] - rb[r][c]));
  }
  return gap;
}

inline Matrix encoder_output(ConNetModel& model, const AttributedGraph& g) {
  const CandidateSubgraph sub = whole(g);
  ad::Tape tape;
  ad::Rng unused(0);
  auto fwd = forward(model, tape, init_features(sub, Query{}), adjacency_matrix(sub), Mode::eval, unused);
  return fwd.combined.value();
}

// Encoder output multiset gap between the path P4 and the star K_{1,3}
// under a random-weight model.
inline double path_star_gap(std::uint64_t seed, std::size_t latent_dim = 8) {
  const AttributedGraph p4 = graph_from_edges("a b\nb c\nc d\n");
  const AttributedGraph k13 = graph_from_edges("h a\nh b\nh c\n");
  ConNetModel model({latent_dim, 2, 0.0}, 0.01, seed);
  return multiset_gap(encoder_output(model, p4), encoder_output(model, k13));
}

// Small planted benchmark prepared for training.
struct Toy {
  Dataset data;
  BipartiteGraph bipartite;
  std::vector<PreparedQuery> train, validation;
};

inline Toy make_toy(std::size_t nodes = 120, std::size_t communities = 4, std::size_t train_queries = 12,
                    std::size_t val_queries = 6, std::uint64_t seed = 3) {
  PlantedConfig pc;
  pc.nodes = nodes;
  pc.communities = communities;
  pc.noise_vocabulary = 12;
  pc.seed = seed;
  Toy toy{generate_planted(pc), {}, {}, {}};
  toy.bipartite = build_bipartite(toy.data.graph);
  ExtractionConfig ex;
  ex.attribute_max_hops = 2;
  std::mt19937_64 rng(seed);
  auto prep = [&](std::size_t count, std::vector<PreparedQuery>& out) {
    for (auto& p : gen_queries(toy.data.graph, toy.data.communities, count, QueryMode::AFN, rng)) {
      out.push_back(prepare_query(toy.data.graph, toy.bipartite, p.query, p.truth, ex));
    }
  };
  prep(train_queries, toy.train);
  prep(val_queries, toy.validation);
  return toy;
}

}  // namespace alice::testing
