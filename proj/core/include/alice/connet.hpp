#pragma once

// Consistency-aware community scorer.
//
// Each of K layers runs two branches (structure and attribute). Per branch a
// cross-attention block lets the per-node query representation attend over
// the candidate's node representations, and a GIN block propagates the node
// representations along candidate edges. The branch outputs are
// concatenated, query information is passed to the next layer through two
// perceptrons, and a final perceptron with a sigmoid scores every node.
//
// Training minimises  L_b + alpha * L_w + beta * L_m  where L_b is summed
// binary cross-entropy, L_w the critic's estimate of the Wasserstein-1 gap
// between structure and attribute representations (critic weights clipped to
// [-c, c] and trained adversarially), and L_m = ||A - H H^T||_F.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alice/autodiff.hpp"
#include "alice/extraction.hpp"
#include "alice/graph.hpp"
#include "alice/query.hpp"
#include "alice/search.hpp"

namespace alice {

using ad::Matrix;

/// Per-node input widths. Every layer-0 input has a fixed width so a single
/// model applies to candidates of any size.
inline constexpr ad::Index kQueryInputWidth = 1;
inline constexpr ad::Index kStructureInputWidth = 2;  // [is query node, 1]
inline constexpr ad::Index kAttributeInputWidth = 3;  // [has query attr, overlap, 1]

struct ConNetConfig {
  std::size_t latent_dim = 128;
  std::size_t layers = 2;
  double dropout = 0.45;
};

struct LossWeights {
  double alpha = 0.1;
  double beta = 0.1;
  double clip = 0.01;
};

/// Initial representations of one (candidate, query) pair. Row i belongs to
/// local node i of the candidate.
struct NodeFeatures {
  Matrix query_nodes;       // n x 1, 1 where the node is a query node
  Matrix query_attributes;  // n x 1, 1 where the node holds any query attribute
  Matrix structure;         // n x kStructureInputWidth
  Matrix attribute;         // n x kAttributeInputWidth
};

/// Throws std::invalid_argument when a query node lies outside the candidate.
NodeFeatures init_features(const CandidateSubgraph& sub, const Query& query);

/// Dense symmetric 0/1 adjacency of the candidate.
Matrix adjacency_matrix(const CandidateSubgraph& sub);

/// Two-layer perceptron: relu(x W1 + b1) W2 + b2.
struct Perceptron {
  ad::Tensor w1, b1, w2, b2;

  Perceptron() = default;
  Perceptron(ad::Index in, ad::Index hidden, ad::Index out, ad::Rng& rng);
  /// With `frozen` the weights enter the tape as constants.
  ad::Var apply(ad::Tape& tape, const ad::Var& x, bool frozen = false);
  std::vector<ad::Tensor*> parameters();
};

/// Query/key/value projections of one cross-attention block.
struct AttentionBlock {
  ad::Tensor wq, wk, wv;
};

struct EncoderLayer {
  AttentionBlock structure_attention, attribute_attention;
  ad::Tensor epsilon;  // 1x1, shared by both GIN blocks of the layer
  Perceptron structure_gin, attribute_gin;
  std::optional<Perceptron> query_node_pass, query_attr_pass;  // absent on the last layer
};

struct NamedTensor {
  std::string name;
  ad::Tensor* tensor;
};

class ConNetModel {
 public:
  /// Weights: Glorot uniform; biases and epsilon zero; critic uniform in [-clip, clip].
  ConNetModel(const ConNetConfig& cfg, double clip, std::uint64_t seed);
  ConNetModel(const ConNetModel&) = delete;
  ConNetModel& operator=(const ConNetModel&) = delete;

  const ConNetConfig& config() const noexcept { return cfg_; }
  std::vector<EncoderLayer>& layers() noexcept { return layers_; }
  Perceptron& scorer() noexcept { return scorer_; }
  Perceptron& critic() noexcept { return critic_; }

  /// Every tensor with a stable name; the order is the serialisation order.
  std::vector<NamedTensor> named_parameters();
  std::vector<ad::Tensor*> encoder_parameters();
  std::vector<ad::Tensor*> critic_parameters();

  std::vector<Matrix> snapshot();
  void restore(const std::vector<Matrix>& values);

 private:
  ConNetConfig cfg_;
  std::vector<EncoderLayer> layers_;
  Perceptron scorer_;
  Perceptron critic_;
};

/// softmax(Xq Xk^T / sqrt(d_out)) Xv with Xq = Hq Wq, Xk = Hg Wk, Xv = Hg Wv.
/// Hq may hold one row or one row per graph node.
ad::Var cross_attention(const ad::Var& hq, const ad::Var& hg, const ad::Var& wq,
                        const ad::Var& wk, const ad::Var& wv);

/// mlp((1 + eps) * H + A H) row by row.
ad::Var gin_layer(const ad::Var& adjacency, const ad::Var& h, const ad::Var& epsilon,
                  Perceptron& mlp);

enum class Mode { train, eval };

struct ForwardResult {
  ad::Var scores;     // n x 1, in (0, 1)
  ad::Var combined;   // H = H^(s) || H^(a), n x 4d
  ad::Var structure;  // H^(s), n x 2d
  ad::Var attribute;  // H^(a), n x 2d
};

ForwardResult forward(ConNetModel& model, ad::Tape& tape, const NodeFeatures& features,
                      const Matrix& adjacency, Mode mode, ad::Rng& rng);

/// Summed binary cross-entropy with scores clamped to [1e-12, 1 - 1e-12].
ad::Var loss_bce(const ad::Var& scores, std::span<const double> truth);
/// ||A - H H^T||_F.
ad::Var loss_local(const ad::Var& h, const ad::Var& adjacency);
/// sum_v f(h_v^(a)) - sum_u f(h_u^(s)).
ad::Var loss_wasserstein(Perceptron& critic, ad::Tape& tape, const ad::Var& hs,
                         const ad::Var& ha, bool frozen_critic = false);

/// One query prepared for the network: extraction output plus features.
struct PreparedQuery {
  Query query;
  ExtractionResult extraction;
  NodeFeatures features;
  Matrix adjacency;
  std::vector<NodeId> truth;     // global ids, may be empty at inference
  std::vector<double> targets;   // per local node, 1 when in truth
};

PreparedQuery prepare_query(const AttributedGraph& g, const BipartiteGraph& bg,
                            const Query& query, std::vector<NodeId> truth,
                            const ExtractionConfig& cfg);

/// Eval-mode node scores for one prepared query.
std::vector<double> predict_scores(ConNetModel& model, const PreparedQuery& q);

struct TrainConfig {
  std::size_t epochs = 300;
  std::size_t patience = 30;  // epochs without validation F1 gain; 0 disables
  ad::AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 0.5, 100};  // decay_interval counts epochs here
  LossWeights weights{};
  ThresholdPolicy thresholds{};
  std::uint64_t seed = 7;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean total loss over training queries
  double bce = 0.0;
  double wasserstein = 0.0;
  double local = 0.0;
  double val_f1 = 0.0;
  double threshold = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> trace;
  std::size_t best_epoch = 0;
  double threshold = 0.5;
  double best_val_f1 = 0.0;
};

/// Trains in place. The model ends with the weights of the best validation
/// epoch. Throws std::invalid_argument for an empty training set.
TrainResult train(ConNetModel& model, std::span<const PreparedQuery> training,
                  std::span<const PreparedQuery> validation, const TrainConfig& cfg);

/// Threshold from the grid maximising mean validation F1 under the model.
ThresholdSelection select_threshold(ConNetModel& model, std::span<const PreparedQuery> validation,
                                    const ThresholdPolicy& policy);

}  // namespace alice
