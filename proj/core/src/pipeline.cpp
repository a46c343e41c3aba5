#include "alice/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "alice/log.hpp"

namespace alice {

namespace fs = std::filesystem;

std::string Paths::in_output(const std::string& name) const {
  return output.empty() ? name : (fs::path(output) / name).string();
}

Paths resolve_paths(const RunConfig& cfg) {
  Paths p;
  p.output = cfg.output;
  p.graph = cfg.graph.empty() ? p.in_output("graph.edges") : cfg.graph;
  p.attrs = cfg.attrs.empty() ? p.in_output("graph.attrs") : cfg.attrs;
  p.communities = cfg.communities.empty() ? p.in_output("communities.txt") : cfg.communities;
  p.model = cfg.model.empty() ? p.in_output("model.alice") : cfg.model;
  return p;
}

namespace {

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InputError(std::string("cannot open ") + what + " file '" + path + "'");
  return in;
}

std::ofstream open_output(const Paths& p, const std::string& path) {
  if (!p.output.empty()) fs::create_directories(p.output);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::vector<std::pair<std::string, std::string>> model_meta(const RunConfig& cfg, double threshold,
                                                            std::size_t best_epoch) {
  auto meta = cfg.entries();
  std::erase_if(meta, [](const auto& kv) {
    static const char* drop[] = {"graph", "attrs", "communities", "queries", "model", "output"};
    for (const char* d : drop) {
      if (kv.first == d) return true;
    }
    return false;
  });
  std::ostringstream t;
  t.precision(17);
  t << threshold;
  meta.emplace_back("selected_threshold", t.str());
  meta.emplace_back("best_epoch", std::to_string(best_epoch));
  meta.emplace_back("init", "glorot_uniform");
  return meta;
}

std::vector<PreparedQuery> prepare_all(const LoadedData& data, std::span<const QueryPair> pairs,
                                       const ExtractionConfig& ex) {
  std::vector<PreparedQuery> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(prepare_query(data.graph, data.bipartite, p.query, p.truth, ex));
  return out;
}

}  // namespace

LoadedData load_data(const RunConfig& cfg, bool with_communities) {
  const Paths p = resolve_paths(cfg);
  LoadedData d;
  {
    auto edges = open_input(p.graph, "graph");
    std::ifstream attrs(p.attrs);
    std::istringstream none;
    if (!attrs && !cfg.attrs.empty()) throw InputError("cannot open attribute file '" + p.attrs + "'");
    try {
      d.graph = attrs ? AttributedGraph::ingest(edges, attrs) : AttributedGraph::ingest(edges, none);
    } catch (const ParseError& e) {
      throw InputError(std::string("malformed graph input: ") + e.what());
    }
  }
  d.bipartite = build_bipartite(d.graph);
  if (with_communities) {
    auto in = open_input(p.communities, "communities");
    try {
      d.communities = read_communities(in, d.graph);
    } catch (const ParseError& e) {
      throw InputError(std::string("malformed communities file: ") + e.what());
    }
    std::erase_if(d.communities, [](const NodeSet& c) { return c.empty(); });
  }
  return d;
}

std::vector<QueryPair> read_queries(std::istream& in, const AttributedGraph& g) {
  std::vector<QueryPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream s(line);
    for (std::string f; std::getline(s, f, '\t');) fields.push_back(f);
    if (fields.size() > 3) throw InputError("query line " + std::to_string(line_no) + ": too many fields");
    fields.resize(3);
    const auto nodes = split_ws(fields[0]);
    const auto attrs = split_ws(fields[1]);
    QueryPair pair;
    pair.query = make_query(g, nodes, attrs, attrs.empty() ? QueryMode::EmA : QueryMode::AFN);
    for (const auto& tok : split_ws(fields[2])) {
      auto v = g.find_node(tok);
      if (!v) throw InputError("query line " + std::to_string(line_no) + ": unknown truth node '" + tok + "'");
      pair.truth.push_back(*v);
    }
    std::sort(pair.truth.begin(), pair.truth.end());
    pair.truth.erase(std::unique(pair.truth.begin(), pair.truth.end()), pair.truth.end());
    out.push_back(std::move(pair));
  }
  return out;
}

void write_queries(std::ostream& out, const AttributedGraph& g, std::span<const QueryPair> pairs) {
  for (const auto& p : pairs) {
    auto join_nodes = [&](std::span<const NodeId> ids) {
      std::string s;
      for (NodeId v : ids) s += (s.empty() ? "" : " ") + g.node_token(v);
      return s;
    };
    std::string attrs;
    for (AttrId a : p.query.attributes) attrs += (attrs.empty() ? "" : " ") + g.attribute_token(a);
    out << join_nodes(p.query.nodes) << '\t' << attrs << '\t' << join_nodes(p.truth) << '\n';
  }
}

Query make_query(const AttributedGraph& g, std::span<const std::string> node_tokens,
                 std::span<const std::string> attr_tokens, QueryMode mode) {
  Query q;
  q.mode = mode;
  for (const auto& tok : node_tokens) {
    auto v = g.find_node(tok);
    if (!v) throw InputError("query node '" + tok + "' is not in the graph");
    if (std::find(q.nodes.begin(), q.nodes.end(), *v) == q.nodes.end()) q.nodes.push_back(*v);
  }
  for (const auto& tok : attr_tokens) {
    auto a = g.find_attribute(tok);
    if (!a) {
      warn("query attribute '" + tok + "' is not in the vocabulary; skipped");
      continue;
    }
    if (std::find(q.attributes.begin(), q.attributes.end(), *a) == q.attributes.end()) {
      q.attributes.push_back(*a);
    }
  }
  return q;
}

QuerySplits make_query_splits(const RunConfig& cfg, const LoadedData& data) {
  QuerySplits s;
  if (!cfg.queries.empty()) {
    auto in = open_input(cfg.queries, "queries");
    auto pairs = read_queries(in, data.graph);
    for (const auto& p : pairs) {
      if (p.truth.empty()) throw InputError("pre-generated queries need a truth field");
    }
    const std::size_t a = std::min(cfg.train_queries, pairs.size());
    const std::size_t b = std::min(a + cfg.val_queries, pairs.size());
    const std::size_t c = std::min(b + cfg.test_queries, pairs.size());
    s.train.assign(pairs.begin(), pairs.begin() + a);
    s.validation.assign(pairs.begin() + a, pairs.begin() + b);
    s.test.assign(pairs.begin() + b, pairs.begin() + c);
    return s;
  }
  if (data.communities.empty()) throw InputError("at least one community is required");
  std::mt19937_64 split_rng(cfg.seed);
  auto parts = split_communities(data.communities, split_rng);
  std::mt19937_64 train_rng(cfg.seed + 1), val_rng(cfg.seed + 2), test_rng(cfg.seed + 3);
  s.train = gen_queries(data.graph, parts.train, cfg.train_queries, cfg.query_mode, train_rng);
  if (cfg.val_queries > 0 && !parts.validation.empty()) {
    s.validation = gen_queries(data.graph, parts.validation, cfg.val_queries, cfg.query_mode, val_rng);
  }
  s.test = gen_queries(data.graph, parts.test, cfg.test_queries, cfg.query_mode, test_rng);
  return s;
}

Dataset cmd_gen(const RunConfig& cfg) {
  PlantedConfig pc = cfg.planted;
  pc.seed = cfg.seed;
  Dataset d;
  try {
    d = generate_planted(pc);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Paths p = resolve_paths(cfg);
  auto edges = open_output(p, p.graph);
  write_edges(edges, d.graph);
  auto attrs = open_output(p, p.attrs);
  write_attributes(attrs, d.graph);
  auto comms = open_output(p, p.communities);
  write_communities(comms, d.graph, d.communities);
  return d;
}

ExtractionResult cmd_extract(const RunConfig& cfg, const LoadedData& data, const Query& query) {
  if (query.nodes.empty()) throw InputError("query nodes required");
  auto result = extract(data.graph, data.bipartite, query, cfg.extraction());
  const Paths p = resolve_paths(cfg);
  auto nodes = open_output(p, p.in_output("candidate.txt"));
  for (NodeId v : result.candidate.global_ids()) nodes << data.graph.node_token(v) << '\n';
  auto trace = open_output(p, p.in_output("trace.csv"));
  trace.precision(17);
  trace << "branch,hop,modularity\n";
  for (const auto& t : result.modularity_trace) {
    trace << to_string(t.branch) << ',' << t.hop << ',' << t.modularity << '\n';
  }
  return result;
}

TrainOutcome cmd_train(const RunConfig& cfg) {
  const LoadedData data = load_data(cfg, cfg.queries.empty());
  if (cfg.queries.empty() && data.communities.empty()) throw InputError("at least one community is required");
  const auto splits = make_query_splits(cfg, data);
  if (splits.train.empty()) throw InputError("no training queries");

  const auto ex = cfg.extraction();
  const auto train_set = prepare_all(data, splits.train, ex);
  const auto val_set = prepare_all(data, splits.validation, ex);

  ConNetModel model(cfg.connet(), cfg.clip, cfg.seed);
  TrainOutcome out;
  out.result = train(model, train_set, val_set, cfg.training());
  out.file = capture(model, model_meta(cfg, out.result.threshold, out.result.best_epoch));

  const Paths p = resolve_paths(cfg);
  if (!p.output.empty()) fs::create_directories(p.output);
  save_model_file(p.model, out.file);
  auto loss = open_output(p, p.in_output("loss.csv"));
  loss.precision(17);
  loss << "epoch,loss,val_f1,bce,wasserstein,local,threshold\n";
  for (const auto& r : out.result.trace) {
    loss << r.epoch << ',' << r.loss << ',' << r.val_f1 << ',' << r.bce << ',' << r.wasserstein << ','
         << r.local << ',' << r.threshold << '\n';
  }
  return out;
}

LoadedModel load_model(const RunConfig& cfg, const std::string& path) {
  const ModelFile file = load_model_file(path);
  LoadedModel m;
  m.cfg = cfg;
  for (const char* key : {"latent_dim", "layers", "dropout", "clip", "tau", "max_hops", "attr_max_hops"}) {
    const std::string* v = file.find_meta(key);
    if (v == nullptr) throw IntegrityError(std::string("model file lacks setting ") + key);
    try {
      m.cfg.set(key, *v);
    } catch (const UsageError& e) {
      throw IntegrityError(std::string("model file setting: ") + e.what());
    }
  }
  const std::string* t = file.find_meta("selected_threshold");
  if (t == nullptr) throw IntegrityError("model file lacks the selected threshold");
  m.threshold = std::stod(*t);
  m.model = std::make_unique<ConNetModel>(m.cfg.connet(), m.cfg.clip, 0);
  apply(file, *m.model);
  return m;
}

CommunityAnswer answer_query(LoadedModel& m, const LoadedData& data, const Query& query) {
  if (query.nodes.empty()) throw InputError("query nodes required");
  const auto prepared = prepare_query(data.graph, data.bipartite, query, {}, m.cfg.extraction());
  CommunityAnswer a;
  a.threshold = m.threshold;
  a.scores = predict_scores(*m.model, prepared);
  const auto& sub = prepared.extraction.candidate;
  a.candidate.assign(sub.global_ids().begin(), sub.global_ids().end());
  std::vector<NodeId> local;
  for (NodeId v : query.nodes) local.push_back(*sub.to_local(v));
  for (NodeId v : constrained_bfs(sub, a.scores, local, a.threshold)) a.nodes.push_back(sub.to_global(v));
  return a;
}

void write_answer_json(std::ostream& out, const AttributedGraph& g, const CommunityAnswer& a) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (NodeId v : a.nodes) j["nodes"].push_back(g.node_token(v));
  j["scores"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < a.candidate.size(); ++i) j["scores"][g.node_token(a.candidate[i])] = a.scores[i];
  j["threshold"] = a.threshold;
  out << j.dump(2) << '\n';
}

ScoredRun evaluate_queries(const LoadedData& data, std::span<const QueryPair> pairs,
                           const Scorer& scorer, double threshold, const ExtractionConfig& ex) {
  if (pairs.empty()) throw InputError("no test queries");
  ScoredRun run;
  std::vector<NodeSet> truths;
  for (const auto& pair : pairs) {
    const auto prepared = prepare_query(data.graph, data.bipartite, pair.query, pair.truth, ex);
    const auto& sub = prepared.extraction.candidate;
    const auto scores = scorer(prepared);
    std::vector<NodeId> local;
    for (NodeId v : pair.query.nodes) local.push_back(*sub.to_local(v));
    NodeSet predicted;
    for (NodeId v : constrained_bfs(sub, scores, local, threshold)) predicted.push_back(sub.to_global(v));
    std::sort(predicted.begin(), predicted.end());

    std::size_t covered = 0;
    for (double t : prepared.targets) covered += t > 0.5;
    run.coverage.push_back(pair.truth.empty() ? 1.0 : static_cast<double>(covered) / pair.truth.size());
    run.candidate_sizes.push_back(sub.node_count());
    run.predictions.push_back(std::move(predicted));
    truths.push_back(pair.truth);
  }
  run.report = evaluate(data.graph, truths, run.predictions);
  return run;
}

ScoredRun cmd_evaluate(const RunConfig& cfg) {
  const Paths p = resolve_paths(cfg);
  LoadedModel m = load_model(cfg, p.model);
  const LoadedData data = load_data(cfg, cfg.queries.empty());
  const auto splits = make_query_splits(cfg, data);
  ConNetModel& model = *m.model;
  auto run = evaluate_queries(
      data, splits.test, [&](const PreparedQuery& q) { return predict_scores(model, q); }, m.threshold,
      m.cfg.extraction());
  auto csv = open_output(p, p.in_output("metrics.csv"));
  write_report_csv(csv, run.report);
  auto json = open_output(p, p.in_output("metrics.json"));
  write_report_json(json, run.report);
  auto per_query = open_output(p, p.in_output("per_query.csv"));
  write_per_query_csv(per_query, run.report);
  return run;
}

}  // namespace alice
