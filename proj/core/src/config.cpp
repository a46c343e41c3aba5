#include "alice/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace alice {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": " +
                   std::string(why));
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "expected a number");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "expected a nonnegative integer");
  return out;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field size_field(T RunConfig::*m, std::uint64_t min = 0) {
  return {[m, min](RunConfig& c, std::string_view k, std::string_view v) {
            auto x = to_uint(k, v);
            if (x < min) bad_value(k, v, "must be at least " + std::to_string(min));
            c.*m = static_cast<T>(x);
          },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field real_field(double RunConfig::*m, double lo, double hi) {
  return {[m, lo, hi](RunConfig& c, std::string_view k, std::string_view v) {
            double x = to_double(k, v);
            if (!(x >= lo && x <= hi)) bad_value(k, v, "must lie in [" + fmt(lo) + ", " + fmt(hi) + "]");
            c.*m = x;
          },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Field text_field(std::string RunConfig::*m) {
  return {[m](RunConfig& c, std::string_view, std::string_view v) { c.*m = std::string(v); },
          [m](const RunConfig& c) { return c.*m; }};
}

template <class T>
Field planted_size(T PlantedConfig::*m, std::uint64_t min) {
  return {[m, min](RunConfig& c, std::string_view k, std::string_view v) {
            auto x = to_uint(k, v);
            if (x < min) bad_value(k, v, "must be at least " + std::to_string(min));
            c.planted.*m = static_cast<T>(x);
          },
          [m](const RunConfig& c) { return std::to_string(c.planted.*m); }};
}

Field planted_prob(double PlantedConfig::*m) {
  return {[m](RunConfig& c, std::string_view k, std::string_view v) {
            double x = to_double(k, v);
            if (!(x >= 0.0 && x <= 1.0)) bad_value(k, v, "must lie in [0, 1]");
            c.planted.*m = x;
          },
          [m](const RunConfig& c) { return fmt(c.planted.*m); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"seed", size_field(&RunConfig::seed)},
      {"tau", real_field(&RunConfig::tau, 1e-9, 1e9)},
      {"max_hops", size_field(&RunConfig::max_hops)},
      {"attr_max_hops", size_field(&RunConfig::attr_max_hops)},
      {"alpha", real_field(&RunConfig::alpha, 0.0, 1.0)},
      {"beta", real_field(&RunConfig::beta, 0.0, 1.0)},
      {"clip", real_field(&RunConfig::clip, 1e-12, 1e9)},
      {"latent_dim", size_field(&RunConfig::latent_dim, 1)},
      {"layers", size_field(&RunConfig::layers, 1)},
      {"epochs", size_field(&RunConfig::epochs, 1)},
      {"patience", size_field(&RunConfig::patience)},
      {"lr", real_field(&RunConfig::lr, 1e-12, 1.0)},
      {"lr_decay", real_field(&RunConfig::lr_decay, 1e-12, 1.0)},
      {"lr_decay_every", size_field(&RunConfig::lr_decay_every)},
      {"dropout", real_field(&RunConfig::dropout, 0.0, 0.99)},
      {"thresholds",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          std::vector<double> grid;
          std::string_view rest = v;
          while (!rest.empty()) {
            auto comma = rest.find(',');
            grid.push_back(to_double(k, trim(rest.substr(0, comma))));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
          }
          try {
            ThresholdPolicy{grid}.validate();
          } catch (const std::invalid_argument& e) {
            bad_value(k, v, e.what());
          }
          c.thresholds = std::move(grid);
        },
        [](const RunConfig& c) {
          std::string out;
          for (double t : c.thresholds) out += (out.empty() ? "" : ",") + fmt(t);
          return out;
        }}},
      {"query_mode",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          auto m = parse_query_mode(v);
          if (!m) bad_value(k, v, "expected EmA, AFC or AFN");
          c.query_mode = *m;
        },
        [](const RunConfig& c) { return std::string(to_string(c.query_mode)); }}},
      {"train_queries", size_field(&RunConfig::train_queries, 1)},
      {"val_queries", size_field(&RunConfig::val_queries)},
      {"test_queries", size_field(&RunConfig::test_queries, 1)},
      {"nodes", planted_size(&PlantedConfig::nodes, 1)},
      {"num_communities", planted_size(&PlantedConfig::communities, 1)},
      {"p_in", planted_prob(&PlantedConfig::p_in)},
      {"p_out", planted_prob(&PlantedConfig::p_out)},
      {"signature_attributes", planted_size(&PlantedConfig::signature_attributes, 0)},
      {"signature_rate", planted_prob(&PlantedConfig::signature_rate)},
      {"noise_vocabulary", planted_size(&PlantedConfig::noise_vocabulary, 0)},
      {"noise_per_node", planted_size(&PlantedConfig::noise_per_node, 0)},
      {"graph", text_field(&RunConfig::graph)},
      {"attrs", text_field(&RunConfig::attrs)},
      {"communities", text_field(&RunConfig::communities)},
      {"queries", text_field(&RunConfig::queries)},
      {"model", text_field(&RunConfig::model)},
      {"output", text_field(&RunConfig::output)},
  };
  return table;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(*this, key, trim(value));
      return;
    }
  }
  throw UsageError("unknown configuration key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(*this));
  return out;
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& entry : fields()) out.push_back(entry.first);
  return out;
}

ExtractionConfig RunConfig::extraction() const {
  ExtractionConfig c;
  c.tau = tau;
  if (max_hops > 0) c.max_hops = max_hops;
  if (attr_max_hops > 0) c.attribute_max_hops = attr_max_hops;
  return c;
}

ConNetConfig RunConfig::connet() const { return {latent_dim, layers, dropout}; }

TrainConfig RunConfig::training() const {
  TrainConfig t;
  t.epochs = epochs;
  t.patience = patience;
  t.adam.learning_rate = lr;
  t.adam.decay_factor = lr_decay;
  t.adam.decay_interval = lr_decay_every;
  t.weights = {alpha, beta, clip};
  t.thresholds.grid = thresholds;
  t.seed = seed;
  return t;
}

void load_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      cfg.set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  load_config(in, cfg);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& [k, v] : cfg.entries()) out << k << " = " << v << '\n';
}

}  // namespace alice
