// alice: attributed community search from the command line.
//
// Exit codes: 0 success, 1 usage, 2 input, 3 integrity.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "alice/config.hpp"
#include "alice/pipeline.hpp"

namespace {

using namespace alice;

constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kIntegrity = 3;

struct Common {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "key = value configuration file");
  for (const auto& key : RunConfig::keys()) {
    cmd->add_option("--" + key, c.overrides[key], "overrides '" + key + "' from the config file");
  }
}

RunConfig resolve(const CLI::App* cmd, const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) load_config_file(c.config_path, cfg);
  for (const auto& [key, value] : c.overrides) {
    if (cmd->count("--" + key) > 0) cfg.set(key, value);
  }
  return cfg;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

// --nodes/--attrs win; otherwise the first line of the queries file.
Query read_query(const RunConfig& cfg, const LoadedData& data, const std::string& nodes,
                 const std::string& attrs) {
  if (!nodes.empty() || !attrs.empty()) {
    const auto a = tokens(attrs);
    return make_query(data.graph, tokens(nodes), a, a.empty() ? QueryMode::EmA : QueryMode::AFN);
  }
  if (cfg.queries.empty()) throw InputError("query nodes required");
  std::ifstream in(cfg.queries);
  if (!in) throw InputError("cannot open queries file '" + cfg.queries + "'");
  auto pairs = read_queries(in, data.graph);
  if (pairs.empty()) throw InputError("query nodes required");
  return pairs.front().query;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attributed community search"};
  app.require_subcommand(1);

  Common gen_c, ex_c, tr_c, q_c, ev_c;
  std::string ex_nodes, ex_attrs, q_nodes, q_attrs;

  auto* gen = app.add_subcommand("gen", "write a planted-partition benchmark");
  add_config_options(gen, gen_c);

  auto* ex = app.add_subcommand("extract", "extract the candidate subgraph of a query");
  add_config_options(ex, ex_c);
  ex->add_option("--query-nodes", ex_nodes, "space separated node tokens");
  ex->add_option("--query-attrs", ex_attrs, "space separated attribute tokens");

  auto* tr = app.add_subcommand("train", "train a model and select its threshold");
  add_config_options(tr, tr_c);

  auto* q = app.add_subcommand("query", "answer one query with a trained model");
  add_config_options(q, q_c);
  q->add_option("--query-nodes", q_nodes, "space separated node tokens");
  q->add_option("--query-attrs", q_attrs, "space separated attribute tokens");

  auto* ev = app.add_subcommand("evaluate", "score a trained model on test queries");
  add_config_options(ev, ev_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (gen->parsed()) {
      const RunConfig cfg = resolve(gen, gen_c);
      const auto d = cmd_gen(cfg);
      const auto p = resolve_paths(cfg);
      std::cout << "wrote " << d.graph.node_count() << " nodes, " << d.graph.edge_count() << " edges, "
                << d.communities.size() << " communities to " << p.graph << ", " << p.attrs << ", "
                << p.communities << '\n';
    } else if (ex->parsed()) {
      const RunConfig cfg = resolve(ex, ex_c);
      const auto data = load_data(cfg, false);
      const auto query = read_query(cfg, data, ex_nodes, ex_attrs);
      const auto r = cmd_extract(cfg, data, query);
      for (NodeId v : r.candidate.global_ids()) std::cout << data.graph.node_token(v) << '\n';
    } else if (tr->parsed()) {
      const RunConfig cfg = resolve(tr, tr_c);
      const auto out = cmd_train(cfg);
      std::cout << "epochs " << out.result.trace.size() << ", best epoch " << out.result.best_epoch
                << ", validation F1 " << out.result.best_val_f1 << ", threshold " << out.result.threshold
                << '\n';
    } else if (q->parsed()) {
      const RunConfig cfg = resolve(q, q_c);
      auto model = load_model(cfg, resolve_paths(cfg).model);
      const auto data = load_data(cfg, false);
      const auto query = read_query(cfg, data, q_nodes, q_attrs);
      write_answer_json(std::cout, data.graph, answer_query(model, data, query));
    } else if (ev->parsed()) {
      const RunConfig cfg = resolve(ev, ev_c);
      write_report_csv(std::cout, cmd_evaluate(cfg).report);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IntegrityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return 0;
}
