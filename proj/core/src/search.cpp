#include "alice/search.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace alice {

std::vector<double> ThresholdPolicy::default_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

void ThresholdPolicy::validate() const {
  if (grid.empty()) throw std::invalid_argument("threshold grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
      throw std::invalid_argument("threshold " + std::to_string(grid[i]) + " outside (0, 1)");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("threshold grid must be strictly ascending");
    }
  }
}

std::vector<NodeId> constrained_bfs(const CandidateSubgraph& sub, std::span<const double> scores,
                                    std::span<const NodeId> query_local, double threshold) {
  const std::size_t n = sub.node_count();
  if (scores.size() != n) throw std::invalid_argument("constrained_bfs: one score per node required");
  std::vector<char> seen(n, 0);
  std::vector<NodeId> queue;
  for (NodeId q : query_local) {
    if (q >= n) throw std::out_of_range("constrained_bfs: query node outside candidate");
    if (!seen[q]) {
      seen[q] = 1;
      queue.push_back(q);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (NodeId u : sub.neighbors(queue[head])) {
      if (!seen[u] && scores[u] > threshold) {
        seen[u] = 1;
        queue.push_back(u);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

double query_f1(std::span<const NodeId> truth, std::span<const NodeId> predicted) {
  std::vector<NodeId> t(truth.begin(), truth.end());
  std::vector<NodeId> p(predicted.begin(), predicted.end());
  std::sort(t.begin(), t.end());
  std::sort(p.begin(), p.end());
  std::vector<NodeId> common;
  std::set_intersection(t.begin(), t.end(), p.begin(), p.end(), std::back_inserter(common));
  if (common.empty()) return 0.0;
  const double pre = static_cast<double>(common.size()) / p.size();
  const double rec = static_cast<double>(common.size()) / t.size();
  return 2.0 * pre * rec / (pre + rec);
}

ThresholdSelection select_threshold(std::span<const ScoredQuery> validation,
                                    const ThresholdPolicy& policy) {
  policy.validate();
  if (validation.empty()) throw std::invalid_argument("select_threshold: validation set is empty");

  ThresholdSelection out;
  out.mean_f1.assign(policy.grid.size(), 0.0);
  std::vector<NodeId> global;
  for (const ScoredQuery& q : validation) {
    for (std::size_t i = 0; i < policy.grid.size(); ++i) {
      auto local = constrained_bfs(*q.candidate, q.scores, q.query_local, policy.grid[i]);
      global.clear();
      for (NodeId v : local) global.push_back(q.candidate->to_global(v));
      out.mean_f1[i] += query_f1(q.truth, global);
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < out.mean_f1.size(); ++i) {
    out.mean_f1[i] /= static_cast<double>(validation.size());
    if (out.mean_f1[i] > out.mean_f1[best]) best = i;
  }
  out.threshold = policy.grid[best];
  out.f1 = out.mean_f1[best];
  return out;
}

}  // namespace alice
