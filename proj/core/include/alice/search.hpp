#pragma once

// Materialising a community from per-node scores.

#include <span>
#include <vector>

#include "alice/graph.hpp"

namespace alice {

struct ThresholdPolicy {
  std::vector<double> grid = default_grid();

  /// 0.05, 0.10, ..., 0.95.
  static std::vector<double> default_grid();
  /// Throws std::invalid_argument unless the grid is nonempty, strictly
  /// ascending and inside (0, 1).
  void validate() const;
};

/// Nodes with score > threshold reachable from a query node through nodes
/// that also pass, plus the query nodes themselves. Returns sorted local ids.
/// Query nodes are given as local ids of `sub`.
std::vector<NodeId> constrained_bfs(const CandidateSubgraph& sub, std::span<const double> scores,
                                    std::span<const NodeId> query_local, double threshold);

/// Scores of one validation query together with what is needed to grade it.
struct ScoredQuery {
  const CandidateSubgraph* candidate = nullptr;
  std::vector<double> scores;       // per local node
  std::vector<NodeId> query_local;  // local ids
  std::vector<NodeId> truth;        // global ids
};

struct ThresholdSelection {
  double threshold = 0.0;
  double f1 = 0.0;                // mean F1 at the chosen threshold
  std::vector<double> mean_f1;    // per grid point
};

/// Grid threshold with the highest mean per-query F1; ties go to the lowest.
/// Throws std::invalid_argument for an empty validation set.
ThresholdSelection select_threshold(std::span<const ScoredQuery> validation,
                                    const ThresholdPolicy& policy);

/// F1 of a single predicted set (global ids) against a truth set.
double query_f1(std::span<const NodeId> truth, std::span<const NodeId> predicted);

}  // namespace alice
