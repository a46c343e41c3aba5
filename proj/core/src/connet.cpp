#include "alice/connet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace alice {

using ad::Index;
using ad::Tape;
using ad::Tensor;
using ad::Var;

NodeFeatures init_features(const CandidateSubgraph& sub, const Query& query) {
  const auto n = static_cast<Index>(sub.node_count());
  NodeFeatures f;
  f.query_nodes = Matrix::Zero(n, kQueryInputWidth);
  f.query_attributes = Matrix::Zero(n, kQueryInputWidth);
  f.structure = Matrix::Zero(n, kStructureInputWidth);
  f.attribute = Matrix::Zero(n, kAttributeInputWidth);

  for (NodeId q : query.nodes) {
    auto local = sub.to_local(q);
    if (!local) {
      throw std::invalid_argument("query node " + std::to_string(q) + " is outside the candidate");
    }
    f.query_nodes(*local, 0) = 1.0;
  }

  std::vector<AttrId> wanted(query.attributes.begin(), query.attributes.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  for (Index v = 0; v < n; ++v) {
    std::size_t held = 0;
    for (AttrId a : sub.attributes(static_cast<NodeId>(v))) {
      held += std::binary_search(wanted.begin(), wanted.end(), a);
    }
    const double any = held > 0 ? 1.0 : 0.0;
    f.query_attributes(v, 0) = any;
    f.structure(v, 0) = f.query_nodes(v, 0);
    f.structure(v, 1) = 1.0;
    f.attribute(v, 0) = any;
    f.attribute(v, 1) = wanted.empty() ? 0.0 : static_cast<double>(held) / wanted.size();
    f.attribute(v, 2) = 1.0;
  }
  return f;
}

Matrix adjacency_matrix(const CandidateSubgraph& sub) {
  const auto n = static_cast<Index>(sub.node_count());
  Matrix a = Matrix::Zero(n, n);
  for (Index v = 0; v < n; ++v) {
    for (NodeId u : sub.neighbors(static_cast<NodeId>(v))) a(v, u) = 1.0;
  }
  return a;
}

// ---------------------------------------------------------------------------

Perceptron::Perceptron(Index in, Index hidden, Index out, ad::Rng& rng)
    : w1(in, hidden), b1(1, hidden), w2(hidden, out), b2(1, out) {
  ad::glorot_uniform(w1, rng);
  ad::glorot_uniform(w2, rng);
}

Var Perceptron::apply(Tape& tape, const Var& x, bool frozen) {
  auto bind = [&](Tensor& t) { return frozen ? tape.constant(t.values()) : tape.parameter(t); };
  Var h = ad::relu(ad::add_row(ad::matmul(x, bind(w1)), bind(b1)));
  return ad::add_row(ad::matmul(h, bind(w2)), bind(b2));
}

std::vector<Tensor*> Perceptron::parameters() { return {&w1, &b1, &w2, &b2}; }

namespace {

AttentionBlock make_attention(Index in_q, Index in_g, Index d, ad::Rng& rng) {
  AttentionBlock b{Tensor(in_q, d), Tensor(in_g, d), Tensor(in_g, d)};
  ad::glorot_uniform(b.wq, rng);
  ad::glorot_uniform(b.wk, rng);
  ad::glorot_uniform(b.wv, rng);
  return b;
}

void add_block(std::vector<NamedTensor>& out, const std::string& prefix, Perceptron& p) {
  out.push_back({prefix + ".w1", &p.w1});
  out.push_back({prefix + ".b1", &p.b1});
  out.push_back({prefix + ".w2", &p.w2});
  out.push_back({prefix + ".b2", &p.b2});
}

}  // namespace

ConNetModel::ConNetModel(const ConNetConfig& cfg, double clip, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.latent_dim == 0) throw std::invalid_argument("latent_dim must be positive");
  if (cfg.layers == 0) throw std::invalid_argument("layer count must be positive");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) throw std::invalid_argument("dropout must be in [0, 1)");
  if (!(clip > 0.0)) throw std::invalid_argument("critic clip must be positive");

  ad::Rng rng(seed);
  const auto d = static_cast<Index>(cfg.latent_dim);
  layers_.reserve(cfg.layers);
  for (std::size_t k = 0; k < cfg.layers; ++k) {
    const Index in_q = k == 0 ? kQueryInputWidth : d;
    const Index in_s = k == 0 ? kStructureInputWidth : d;
    const Index in_a = k == 0 ? kAttributeInputWidth : d;
    EncoderLayer layer;
    layer.structure_attention = make_attention(in_q, in_s, d, rng);
    layer.attribute_attention = make_attention(in_q, in_a, d, rng);
    layer.epsilon = Tensor(1, 1);
    layer.structure_gin = Perceptron(in_s, d, d, rng);
    layer.attribute_gin = Perceptron(in_a, d, d, rng);
    if (k + 1 < cfg.layers) {
      layer.query_node_pass = Perceptron(4 * d, d, d, rng);
      layer.query_attr_pass = Perceptron(4 * d, d, d, rng);
    }
    layers_.push_back(std::move(layer));
  }
  scorer_ = Perceptron(4 * d, d, 1, rng);

  critic_ = Perceptron(2 * d, d, 1, rng);
  std::uniform_real_distribution<double> box(-clip, clip);
  for (Tensor* t : critic_.parameters()) {
    for (Index i = 0; i < t->size(); ++i) t->values().data()[i] = box(rng);
  }
}

std::vector<NamedTensor> ConNetModel::named_parameters() {
  std::vector<NamedTensor> out;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    EncoderLayer& l = layers_[k];
    const std::string p = "layer" + std::to_string(k);
    out.push_back({p + ".struct_att.wq", &l.structure_attention.wq});
    out.push_back({p + ".struct_att.wk", &l.structure_attention.wk});
    out.push_back({p + ".struct_att.wv", &l.structure_attention.wv});
    out.push_back({p + ".attr_att.wq", &l.attribute_attention.wq});
    out.push_back({p + ".attr_att.wk", &l.attribute_attention.wk});
    out.push_back({p + ".attr_att.wv", &l.attribute_attention.wv});
    out.push_back({p + ".eps", &l.epsilon});
    add_block(out, p + ".struct_gin", l.structure_gin);
    add_block(out, p + ".attr_gin", l.attribute_gin);
    if (l.query_node_pass) add_block(out, p + ".query_node_pass", *l.query_node_pass);
    if (l.query_attr_pass) add_block(out, p + ".query_attr_pass", *l.query_attr_pass);
  }
  add_block(out, "scorer", scorer_);
  add_block(out, "critic", critic_);
  return out;
}

std::vector<Tensor*> ConNetModel::encoder_parameters() {
  std::vector<Tensor*> out;
  for (auto& nt : named_parameters()) {
    if (nt.name.rfind("critic.", 0) != 0) out.push_back(nt.tensor);
  }
  return out;
}

std::vector<Tensor*> ConNetModel::critic_parameters() { return critic_.parameters(); }

std::vector<Matrix> ConNetModel::snapshot() {
  std::vector<Matrix> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor->values());
  return out;
}

void ConNetModel::restore(const std::vector<Matrix>& values) {
  auto params = named_parameters();
  if (params.size() != values.size()) throw std::invalid_argument("restore: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = *params[i].tensor;
    if (t.rows() != values[i].rows() || t.cols() != values[i].cols()) {
      throw ad::ShapeError("restore: shape mismatch for " + params[i].name);
    }
    t.values() = values[i];
  }
}

// ---------------------------------------------------------------------------

Var cross_attention(const Var& hq, const Var& hg, const Var& wq, const Var& wk, const Var& wv) {
  if (hq.cols() != wq.rows() || hg.cols() != wk.rows() || hg.cols() != wv.rows() ||
      wq.cols() != wk.cols()) {
    throw ad::ShapeError("cross_attention: query " + ad::shape_string(hq.rows(), hq.cols()) +
                         " and graph " + ad::shape_string(hg.rows(), hg.cols()) +
                         " do not chain with the projections");
  }
  Var xq = ad::matmul(hq, wq);
  Var xk = ad::matmul(hg, wk);
  Var xv = ad::matmul(hg, wv);
  Var logits = ad::scale(ad::matmul(xq, ad::transpose(xk)),
                         1.0 / std::sqrt(static_cast<double>(wq.cols())));
  return ad::matmul(ad::softmax_rows(logits), xv);
}

Var gin_layer(const Var& adjacency, const Var& h, const Var& epsilon, Perceptron& mlp) {
  Var self = ad::scale_by(h, ad::add_scalar(epsilon, 1.0));
  Var agg = ad::add(self, ad::matmul(adjacency, h));
  return mlp.apply(*h.tape(), agg);
}

ForwardResult forward(ConNetModel& model, Tape& tape, const NodeFeatures& features,
                      const Matrix& adjacency, Mode mode, ad::Rng& rng) {
  const Index n = features.structure.rows();
  if (n == 0) throw std::invalid_argument("forward: empty candidate");
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw ad::ShapeError("forward: adjacency must be " + ad::shape_string(n, n));
  }
  const bool training = mode == Mode::train;
  const double rate = model.config().dropout;

  Var a = tape.constant(adjacency);
  Var hq_v = tape.constant(features.query_nodes);
  Var hq_f = tape.constant(features.query_attributes);
  Var hs = tape.constant(features.structure);
  Var ha = tape.constant(features.attribute);

  ForwardResult out;
  auto& layers = model.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    EncoderLayer& l = layers[k];
    Var eps = tape.parameter(l.epsilon);

    Var vq = cross_attention(hq_v, hs, tape.parameter(l.structure_attention.wq),
                             tape.parameter(l.structure_attention.wk),
                             tape.parameter(l.structure_attention.wv));
    Var hs_next = ad::dropout(gin_layer(a, hs, eps, l.structure_gin), rate, training, rng);
    Var fq = cross_attention(hq_f, ha, tape.parameter(l.attribute_attention.wq),
                             tape.parameter(l.attribute_attention.wk),
                             tape.parameter(l.attribute_attention.wv));
    Var ha_next = ad::dropout(gin_layer(a, ha, eps, l.attribute_gin), rate, training, rng);

    out.structure = ad::concat_cols({vq, hs_next});
    out.attribute = ad::concat_cols({fq, ha_next});
    if (l.query_node_pass) {
      Var both = ad::concat_cols({out.structure, out.attribute});
      hq_v = l.query_node_pass->apply(tape, both);
      hq_f = l.query_attr_pass->apply(tape, both);
    }
    hs = hs_next;
    ha = ha_next;
  }
  out.combined = ad::concat_cols({out.structure, out.attribute});
  out.scores = ad::sigmoid(model.scorer().apply(tape, out.combined));
  return out;
}

// ---------------------------------------------------------------------------

Var loss_bce(const Var& scores, std::span<const double> truth) {
  if (scores.cols() != 1 || static_cast<std::size_t>(scores.rows()) != truth.size()) {
    throw ad::ShapeError("loss_bce: scores " + ad::shape_string(scores.rows(), scores.cols()) +
                         " against " + std::to_string(truth.size()) + " targets");
  }
  Tape& tape = *scores.tape();
  Matrix c(scores.rows(), 1);
  for (Index i = 0; i < c.rows(); ++i) c(i, 0) = truth[static_cast<std::size_t>(i)];
  Var s = ad::clamp(scores, 1e-12, 1.0 - 1e-12);
  Var pos = ad::mul(tape.constant(c), ad::log(s));
  Var neg = ad::mul(tape.constant(Matrix::Ones(c.rows(), 1) - c),
                    ad::log(ad::add_scalar(ad::scale(s, -1.0), 1.0)));
  return ad::scale(ad::sum(ad::add(pos, neg)), -1.0);
}

Var loss_local(const Var& h, const Var& adjacency) {
  return ad::frobenius_norm(ad::sub(adjacency, ad::matmul(h, ad::transpose(h))));
}

Var loss_wasserstein(Perceptron& critic, Tape& tape, const Var& hs, const Var& ha,
                     bool frozen_critic) {
  if (hs.rows() != ha.rows() || hs.cols() != ha.cols()) {
    throw ad::ShapeError("loss_wasserstein: structure and attribute shapes differ");
  }
  return ad::sub(ad::sum(critic.apply(tape, ha, frozen_critic)),
                 ad::sum(critic.apply(tape, hs, frozen_critic)));
}

// ---------------------------------------------------------------------------

PreparedQuery prepare_query(const AttributedGraph& g, const BipartiteGraph& bg, const Query& query,
                            std::vector<NodeId> truth, const ExtractionConfig& cfg) {
  PreparedQuery p{query, extract(g, bg, query, cfg), {}, {}, std::move(truth), {}};
  std::sort(p.truth.begin(), p.truth.end());
  p.features = init_features(p.extraction.candidate, query);
  p.adjacency = adjacency_matrix(p.extraction.candidate);
  const auto ids = p.extraction.candidate.global_ids();
  p.targets.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    p.targets[i] = std::binary_search(p.truth.begin(), p.truth.end(), ids[i]) ? 1.0 : 0.0;
  }
  return p;
}

std::vector<double> predict_scores(ConNetModel& model, const PreparedQuery& q) {
  Tape tape;
  ad::Rng unused(0);
  auto fwd = forward(model, tape, q.features, q.adjacency, Mode::eval, unused);
  const Matrix& s = fwd.scores.value();
  return std::vector<double>(s.data(), s.data() + s.size());
}

namespace {

std::vector<NodeId> local_query_nodes(const PreparedQuery& q) {
  std::vector<NodeId> out;
  for (NodeId v : q.query.nodes) out.push_back(*q.extraction.candidate.to_local(v));
  return out;
}

}  // namespace

ThresholdSelection select_threshold(ConNetModel& model, std::span<const PreparedQuery> validation,
                                    const ThresholdPolicy& policy) {
  if (validation.empty()) throw std::invalid_argument("select_threshold: validation set is empty");
  std::vector<ScoredQuery> scored;
  scored.reserve(validation.size());
  for (const PreparedQuery& q : validation) {
    scored.push_back({&q.extraction.candidate, predict_scores(model, q), local_query_nodes(q), q.truth});
  }
  return select_threshold(scored, policy);
}

TrainResult train(ConNetModel& model, std::span<const PreparedQuery> training,
                  std::span<const PreparedQuery> validation, const TrainConfig& cfg) {
  if (training.empty()) throw std::invalid_argument("train: empty training set");
  if (cfg.epochs == 0) throw std::invalid_argument("train: epochs must be positive");
  const LossWeights& w = cfg.weights;
  if (w.alpha < 0.0 || w.beta < 0.0 || !(w.clip > 0.0)) {
    throw std::invalid_argument("train: loss weights must be nonnegative and clip positive");
  }
  cfg.thresholds.validate();

  ad::AdamConfig enc_cfg = cfg.adam;
  enc_cfg.decay_interval = cfg.adam.decay_interval * training.size();
  ad::Adam encoder(model.encoder_parameters(), enc_cfg);
  ad::Adam critic(model.critic_parameters(), enc_cfg);
  const auto critic_params = model.critic_parameters();

  ad::Rng rng(cfg.seed);
  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  std::vector<Matrix> best_weights;
  double best_f1 = -1.0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t idx : order) {
      const PreparedQuery& q = training[idx];
      Tape tape;
      auto fwd = forward(model, tape, q.features, q.adjacency, Mode::train, rng);

      if (w.alpha > 0.0) {
        // Critic ascends the gap on detached representations.
        Tape ct;
        Var gap = loss_wasserstein(model.critic(), ct, ct.constant(fwd.structure.value()),
                                   ct.constant(fwd.attribute.value()));
        ct.backward(ad::scale(gap, -1.0));
        critic.step();
        critic.zero_grad();
        ad::clip_weights(critic_params, w.clip);
      }

      Var lb = loss_bce(fwd.scores, q.targets);
      Var total = lb;
      double lw_value = 0.0;
      double lm_value = 0.0;
      if (w.alpha > 0.0) {
        Var lw = loss_wasserstein(model.critic(), tape, fwd.structure, fwd.attribute, true);
        lw_value = lw.item();
        total = ad::add(total, ad::scale(lw, w.alpha));
      }
      if (w.beta > 0.0) {
        Var lm = loss_local(fwd.combined, tape.constant(q.adjacency));
        lm_value = lm.item();
        total = ad::add(total, ad::scale(lm, w.beta));
      }
      tape.backward(total);
      encoder.step();
      encoder.zero_grad();

      rec.loss += total.item();
      rec.bce += lb.item();
      rec.wasserstein += lw_value;
      rec.local += lm_value;
    }
    const double count = static_cast<double>(training.size());
    rec.loss /= count;
    rec.bce /= count;
    rec.wasserstein /= count;
    rec.local /= count;

    if (!validation.empty()) {
      auto sel = select_threshold(model, validation, cfg.thresholds);
      rec.val_f1 = sel.f1;
      rec.threshold = sel.threshold;
      if (sel.f1 > best_f1) {
        best_f1 = sel.f1;
        best_weights = model.snapshot();
        result.best_epoch = epoch;
        result.threshold = sel.threshold;
        result.best_val_f1 = sel.f1;
        stale = 0;
      } else {
        ++stale;
      }
    }
    result.trace.push_back(rec);
    if (cfg.patience > 0 && !validation.empty() && stale >= cfg.patience) break;
  }

  if (!best_weights.empty()) {
    model.restore(best_weights);
  } else {
    result.best_epoch = result.trace.size();
  }
  return result;
}

}  // namespace alice
