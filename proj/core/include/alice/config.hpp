#pragma once

// Run configuration: a line-oriented "key = value" file whose keys double as
// command-line flags.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alice/connet.hpp"
#include "alice/extraction.hpp"
#include "alice/query.hpp"
#include "alice/synthetic.hpp"

namespace alice {

/// Bad invocation or configuration (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Unreadable or malformed input data (exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Corrupted artifact (exit code 3).
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint64_t seed = 7;

  double tau = 0.8;
  std::size_t max_hops = 0;       // 0: unlimited
  std::size_t attr_max_hops = 2;  // attribute branch; 0: unlimited

  double alpha = 0.1;
  double beta = 0.1;
  double clip = 0.01;
  std::size_t latent_dim = 128;
  std::size_t layers = 2;
  std::size_t epochs = 300;
  std::size_t patience = 30;
  double lr = 1e-3;
  double lr_decay = 0.5;
  std::size_t lr_decay_every = 100;
  double dropout = 0.45;
  std::vector<double> thresholds = ThresholdPolicy::default_grid();

  QueryMode query_mode = QueryMode::AFN;
  std::size_t train_queries = 150;
  std::size_t val_queries = 100;
  std::size_t test_queries = 100;

  PlantedConfig planted{};

  std::string graph, attrs, communities, queries, model, output;

  /// Sets one key from its textual value. Throws UsageError for an unknown
  /// key or a value that does not parse or is out of range.
  void set(std::string_view key, std::string_view value);
  /// Every key with its current value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  static std::vector<std::string> keys();

  ExtractionConfig extraction() const;
  ConNetConfig connet() const;
  TrainConfig training() const;
};

/// Reads "key = value" lines; '#' starts a comment. Throws UsageError.
void load_config(std::istream& in, RunConfig& cfg);
void load_config_file(const std::string& path, RunConfig& cfg);
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace alice
