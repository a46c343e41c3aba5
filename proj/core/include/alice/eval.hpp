#pragma once

// Query generation, community splits and community quality metrics.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alice/graph.hpp"
#include "alice/query.hpp"

namespace alice {

/// Sorted, duplicate-free node ids. The metrics rely on the ordering.
using NodeSet = std::vector<NodeId>;

struct CommunitySplit {
  std::vector<NodeSet> train, validation, test;
  bool split = true;  // false when every part holds all communities
};

/// Partitions communities by the given ratios (sizes rounded to nearest,
/// totals preserved). With fewer than 10 communities nothing is split and
/// every part receives all of them. Throws for zero communities.
CommunitySplit split_communities(const std::vector<NodeSet>& communities, std::mt19937_64& rng,
                                 double train_ratio = 5, double val_ratio = 1, double test_ratio = 4);

struct QueryPair {
  Query query;
  NodeSet truth;  // sorted global ids
};

/// Attribute ids ranked by (count within the community desc, id asc), at most `k`.
std::vector<AttrId> top_attributes(const AttributedGraph& g, std::span<const NodeId> community,
                                   std::size_t k);

/// Each query picks a community uniformly, then 1 to 3 distinct members.
/// EmA: no attributes. AFC: one attribute drawn from the community's 5 most
/// frequent. AFN: union of the query nodes' attributes, sampled down to 3.
std::vector<QueryPair> gen_queries(const AttributedGraph& g, const std::vector<NodeSet>& communities,
                                   std::size_t count, QueryMode mode, std::mt19937_64& rng);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Micro-averaged: sums of overlaps over sums of sizes. Sets are sorted.
PrfScores f1_suite(std::span<const NodeSet> truths, std::span<const NodeSet> predictions);

/// Mean over communities of the mean degree inside each community.
double avg_degree(const AttributedGraph& g, std::span<const NodeSet> predictions);

/// Mean over communities of the mean Jaccard over all ordered member pairs,
/// diagonal included. Two empty attribute sets count as 0.
double cpj(const AttributedGraph& g, std::span<const NodeSet> predictions);

struct QueryOutcome {
  std::size_t index = 0;
  std::size_t predicted = 0;
  std::size_t truth = 0;
  std::size_t overlap = 0;
  double f1 = 0.0;
};

struct EvaluationReport {
  double f1 = 0.0, precision = 0.0, recall = 0.0, avg_degree = 0.0, cpj = 0.0;
  std::vector<QueryOutcome> per_query;
};

EvaluationReport evaluate(const AttributedGraph& g, std::span<const NodeSet> truths,
                          std::span<const NodeSet> predictions);

void write_report_csv(std::ostream& out, const EvaluationReport& r);
void write_report_json(std::ostream& out, const EvaluationReport& r);
void write_per_query_csv(std::ostream& out, const EvaluationReport& r);

}  // namespace alice
