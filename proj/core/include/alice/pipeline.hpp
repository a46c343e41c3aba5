#pragma once

// End-to-end commands shared by the command-line tool and the tests.
//
// File layout under the `output` directory when explicit paths are unset:
//   graph.edges, graph.attrs, communities.txt   (gen)
//   candidate.txt, trace.csv                    (extract)
//   model.alice, loss.csv                       (train)
//   metrics.csv, metrics.json, per_query.csv    (evaluate)

#include <functional>
#include <memory>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alice/config.hpp"
#include "alice/connet.hpp"
#include "alice/eval.hpp"
#include "alice/model_io.hpp"
#include "alice/synthetic.hpp"

namespace alice {

struct Paths {
  std::string graph, attrs, communities, model;
  std::string output;  // directory, may be empty
  std::string in_output(const std::string& name) const;
};
Paths resolve_paths(const RunConfig& cfg);

struct LoadedData {
  AttributedGraph graph;
  BipartiteGraph bipartite;
  std::vector<NodeSet> communities;
};

/// Throws InputError for unreadable or malformed files.
LoadedData load_data(const RunConfig& cfg, bool with_communities);

/// Query lines: "node tokens<TAB>attribute tokens[<TAB>truth tokens]",
/// tokens space separated, trailing fields optional.
std::vector<QueryPair> read_queries(std::istream& in, const AttributedGraph& g);
void write_queries(std::ostream& out, const AttributedGraph& g, std::span<const QueryPair> pairs);

/// Resolves tokens. Unknown nodes raise InputError naming the token; unknown
/// attributes are dropped with a warning.
Query make_query(const AttributedGraph& g, std::span<const std::string> node_tokens,
                 std::span<const std::string> attr_tokens, QueryMode mode);

struct QuerySplits {
  std::vector<QueryPair> train, validation, test;
};
/// Splits communities with the run seed and draws queries for each part, or
/// slices the pre-generated query file when one is configured.
QuerySplits make_query_splits(const RunConfig& cfg, const LoadedData& data);

Dataset cmd_gen(const RunConfig& cfg);

ExtractionResult cmd_extract(const RunConfig& cfg, const LoadedData& data, const Query& query);

struct TrainOutcome {
  TrainResult result;
  ModelFile file;
};
TrainOutcome cmd_train(const RunConfig& cfg);

struct CommunityAnswer {
  std::vector<NodeId> nodes;           // sorted global ids
  std::vector<NodeId> candidate;       // global ids, matches `scores`
  std::vector<double> scores;
  double threshold = 0.5;
};

/// Rebuilds the model described by a model file. Architecture keys and the
/// extraction settings recorded at training time override `cfg`.
struct LoadedModel {
  RunConfig cfg;
  double threshold = 0.5;
  std::unique_ptr<ConNetModel> model;
};
LoadedModel load_model(const RunConfig& cfg, const std::string& path);

CommunityAnswer answer_query(LoadedModel& m, const LoadedData& data, const Query& query);
void write_answer_json(std::ostream& out, const AttributedGraph& g, const CommunityAnswer& a);

using Scorer = std::function<std::vector<double>(const PreparedQuery&)>;

struct ScoredRun {
  EvaluationReport report;
  std::vector<NodeSet> predictions;
  std::vector<double> coverage;  // share of each truth inside the candidate
  std::vector<std::size_t> candidate_sizes;
};

ScoredRun evaluate_queries(const LoadedData& data, std::span<const QueryPair> pairs,
                           const Scorer& scorer, double threshold, const ExtractionConfig& ex);

ScoredRun cmd_evaluate(const RunConfig& cfg);

}  // namespace alice
