#include "alice/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "alice/log.hpp"

namespace alice {

namespace {

std::size_t overlap(const NodeSet& a, const NodeSet& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  return common;
}

NodeSet sorted_unique(NodeSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// k distinct elements of `pool`, in draw order (partial Fisher-Yates).
template <class T>
std::vector<T> sample(std::vector<T> pool, std::size_t k, std::mt19937_64& rng) {
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

CommunitySplit split_communities(const std::vector<NodeSet>& communities, std::mt19937_64& rng,
                                 double train_ratio, double val_ratio, double test_ratio) {
  if (communities.empty()) throw std::invalid_argument("split_communities: no communities");
  if (train_ratio < 0 || val_ratio < 0 || test_ratio < 0 ||
      !(train_ratio + val_ratio + test_ratio > 0)) {
    throw std::invalid_argument("split_communities: ratios must be nonnegative with a positive sum");
  }
  CommunitySplit out;
  if (communities.size() < 10) {
    warn("fewer than 10 communities; train, validation and test share all of them");
    out.train = out.validation = out.test = communities;
    out.split = false;
    return out;
  }
  std::vector<std::size_t> order(communities.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  const double total = train_ratio + val_ratio + test_ratio;
  const double n = static_cast<double>(communities.size());
  auto n_train = static_cast<std::size_t>(std::llround(n * train_ratio / total));
  auto n_val = static_cast<std::size_t>(std::llround(n * (train_ratio + val_ratio) / total)) - n_train;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NodeSet& c = communities[order[i]];
    if (i < n_train) {
      out.train.push_back(c);
    } else if (i < n_train + n_val) {
      out.validation.push_back(c);
    } else {
      out.test.push_back(c);
    }
  }
  return out;
}

std::vector<AttrId> top_attributes(const AttributedGraph& g, std::span<const NodeId> community,
                                   std::size_t k) {
  std::map<AttrId, std::size_t> counts;
  for (NodeId v : community) {
    for (AttrId a : g.attributes(v)) ++counts[a];
  }
  std::vector<std::pair<AttrId, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<AttrId> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

std::vector<QueryPair> gen_queries(const AttributedGraph& g, const std::vector<NodeSet>& communities,
                                   std::size_t count, QueryMode mode, std::mt19937_64& rng) {
  if (communities.empty()) throw std::invalid_argument("gen_queries: no communities");
  for (const NodeSet& c : communities) {
    if (c.empty()) throw std::invalid_argument("gen_queries: empty community");
  }
  std::vector<QueryPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const NodeSet truth = sorted_unique(communities[uniform_index(rng, communities.size())]);
    const std::size_t k = 1 + uniform_index(rng, 3);
    QueryPair pair;
    pair.truth = truth;
    pair.query.mode = mode;
    pair.query.nodes = sample(truth, k, rng);

    if (mode == QueryMode::AFC) {
      auto pool = top_attributes(g, truth, 5);
      if (pool.empty()) {
        warn("AFC query on an attribute-free community; using an empty attribute set");
        pair.query.mode = QueryMode::EmA;
      } else {
        pair.query.attributes.push_back(pool[uniform_index(rng, pool.size())]);
      }
    } else if (mode == QueryMode::AFN) {
      std::vector<AttrId> pool;
      for (NodeId v : pair.query.nodes) {
        auto attrs = g.attributes(v);
        pool.insert(pool.end(), attrs.begin(), attrs.end());
      }
      std::sort(pool.begin(), pool.end());
      pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
      auto chosen = sample(std::move(pool), 3, rng);
      std::sort(chosen.begin(), chosen.end());
      pair.query.attributes = std::move(chosen);
    }
    out.push_back(std::move(pair));
  }
  return out;
}

PrfScores f1_suite(std::span<const NodeSet> truths, std::span<const NodeSet> predictions) {
  if (truths.size() != predictions.size()) {
    throw std::invalid_argument("f1_suite: truth and prediction counts differ");
  }
  double hit = 0, pred = 0, real = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    hit += static_cast<double>(overlap(truths[i], predictions[i]));
    pred += static_cast<double>(predictions[i].size());
    real += static_cast<double>(truths[i].size());
  }
  PrfScores s;
  s.precision = pred > 0 ? hit / pred : 0.0;
  s.recall = real > 0 ? hit / real : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

double avg_degree(const AttributedGraph& g, std::span<const NodeSet> predictions) {
  if (predictions.empty()) throw std::invalid_argument("avg_degree: no predictions");
  double total = 0.0;
  for (const NodeSet& c : predictions) {
    if (c.empty()) {
      warn("avg_degree: empty community counted as 0");
      continue;
    }
    std::size_t degree_sum = 0;
    for (NodeId v : c) {
      for (NodeId u : g.neighbors(v)) degree_sum += std::binary_search(c.begin(), c.end(), u);
    }
    total += static_cast<double>(degree_sum) / static_cast<double>(c.size());
  }
  return total / static_cast<double>(predictions.size());
}

double cpj(const AttributedGraph& g, std::span<const NodeSet> predictions) {
  if (predictions.empty()) throw std::invalid_argument("cpj: no predictions");
  double total = 0.0;
  for (const NodeSet& c : predictions) {
    if (c.empty()) continue;
    double pair_sum = 0.0;
    for (NodeId u : c) {
      auto fu = g.attributes(u);
      for (NodeId v : c) {
        auto fv = g.attributes(v);
        std::size_t inter = 0, i = 0, j = 0;
        while (i < fu.size() && j < fv.size()) {
          if (fu[i] < fv[j]) {
            ++i;
          } else if (fv[j] < fu[i]) {
            ++j;
          } else {
            ++inter, ++i, ++j;
          }
        }
        const std::size_t uni = fu.size() + fv.size() - inter;
        if (uni > 0) pair_sum += static_cast<double>(inter) / static_cast<double>(uni);
      }
    }
    const double size = static_cast<double>(c.size());
    total += pair_sum / (size * size);
  }
  return total / static_cast<double>(predictions.size());
}

EvaluationReport evaluate(const AttributedGraph& g, std::span<const NodeSet> truths,
                          std::span<const NodeSet> predictions) {
  auto prf = f1_suite(truths, predictions);
  EvaluationReport r;
  r.f1 = prf.f1;
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.avg_degree = avg_degree(g, predictions);
  r.cpj = cpj(g, predictions);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    QueryOutcome q;
    q.index = i;
    q.predicted = predictions[i].size();
    q.truth = truths[i].size();
    q.overlap = overlap(truths[i], predictions[i]);
    q.f1 = f1_suite(truths.subspan(i, 1), predictions.subspan(i, 1)).f1;
    r.per_query.push_back(q);
  }
  return r;
}

void write_report_csv(std::ostream& out, const EvaluationReport& r) {
  out.precision(17);
  out << "metric,value\n"
      << "f1," << r.f1 << "\nprecision," << r.precision << "\nrecall," << r.recall
      << "\navg_degree," << r.avg_degree << "\ncpj," << r.cpj << '\n';
}

void write_report_json(std::ostream& out, const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["f1"] = r.f1;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["avg_degree"] = r.avg_degree;
  j["cpj"] = r.cpj;
  j["queries"] = r.per_query.size();
  out << j.dump(2) << '\n';
}

void write_per_query_csv(std::ostream& out, const EvaluationReport& r) {
  out.precision(17);
  out << "query,predicted,truth,overlap,f1\n";
  for (const auto& q : r.per_query) {
    out << q.index << ',' << q.predicted << ',' << q.truth << ',' << q.overlap << ',' << q.f1 << '\n';
  }
}

}  // namespace alice
