#include "alice/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace alice::ad {

std::string shape_string(Index rows, Index cols) {
  return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

namespace {

[[noreturn]] void shape_mismatch(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.rows(), a.cols()) +
                   " vs " + shape_string(b.rows(), b.cols()));
}

void require_same_shape(const char* op, const Var& a, const Var& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_mismatch(op, a.value(), b.value());
}

Tape& tape_of(std::initializer_list<const Var*> vars) {
  Tape* t = (*vars.begin())->tape();
  if (t == nullptr) throw std::invalid_argument("operation on an unbound Var");
  t->check_owned(vars);
  return *t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Index rows, Index cols, bool requires_grad)
    : values_(Matrix::Zero(rows, cols)), requires_grad_(requires_grad) {}

Tensor::Tensor(Matrix values, bool requires_grad)
    : values_(std::move(values)), requires_grad_(requires_grad) {}

Matrix Tensor::grad() const {
  if (has_grad()) return grad_;
  return Matrix::Zero(rows(), cols());
}

void Tensor::accumulate_grad(const Matrix& g) {
  if (g.rows() != rows() || g.cols() != cols()) shape_mismatch("accumulate_grad", values_, g);
  if (!has_grad()) {
    grad_ = g;
  } else {
    grad_ += g;
  }
}

void Tensor::zero_grad() {
  if (has_grad()) grad_.setZero();
}

// ---------------------------------------------------------------------------
// Var / Tape

const Matrix& Var::value() const {
  if (tape_ == nullptr) throw std::invalid_argument("value() on an unbound Var");
  return tape_->value(id_);
}

double Var::item() const {
  const auto& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeError("item() on non-scalar " + shape_string(v.rows(), v.cols()));
  }
  return v(0, 0);
}

Var Tape::constant(Matrix value) { return record(std::move(value), false, nullptr); }

Var Tape::parameter(Tensor& t) {
  Node node;
  node.value = t.values();
  node.needs_grad = t.requires_grad();
  node.param = &t;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, bool needs_grad, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad;
  if (needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(const Var& v, const Matrix& g) {
  Node& node = nodes_.at(v.id());
  if (!node.needs_grad) return;
  if (g.rows() != node.value.rows() || g.cols() != node.value.cols()) {
    shape_mismatch("backward", node.value, g);
  }
  if (node.grad.size() == 0) {
    node.grad = g;
  } else {
    node.grad += g;
  }
}

void Tape::check_owned(std::initializer_list<const Var*> vars) const {
  for (const Var* v : vars) {
    if (v->tape() != this) throw std::invalid_argument("Var belongs to a different tape");
  }
}

void Tape::backward(const Var& loss) {
  check_owned({&loss});
  const Matrix& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " + shape_string(lv.rows(), lv.cols()));
  }
  accumulate(loss, Matrix::Ones(1, 1));
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.grad.size() == 0) continue;
    if (node.param != nullptr) {
      node.param->accumulate_grad(node.grad);
    } else if (node.backward) {
      node.backward(*this, node.grad, node.value);
    }
  }
  // Intermediate gradients are consumed; a second backward() over the same
  // tape accumulates into the bound tensors again.
  for (Node& node : nodes_) node.grad.resize(0, 0);
}

// ---------------------------------------------------------------------------
// Ops

Var matmul(const Var& a, const Var& b) {
  Tape& t = tape_of({&a, &b});
  if (a.cols() != b.rows()) shape_mismatch("matmul", a.value(), b.value());
  Matrix out = a.value() * b.value();
  const bool ng = t.needs_grad(a) || t.needs_grad(b);
  return t.record(std::move(out), ng, [a, b](Tape& tp, const Matrix& g, const Matrix&) {
    if (tp.needs_grad(a)) tp.accumulate(a, g * b.value().transpose());
    if (tp.needs_grad(b)) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var add(const Var& a, const Var& b) {
  Tape& t = tape_of({&a, &b});
  require_same_shape("add", a, b);
  Matrix out = a.value() + b.value();
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(b),
                  [a, b](Tape& tp, const Matrix& g, const Matrix&) {
                    tp.accumulate(a, g);
                    tp.accumulate(b, g);
                  });
}

Var sub(const Var& a, const Var& b) {
  Tape& t = tape_of({&a, &b});
  require_same_shape("sub", a, b);
  Matrix out = a.value() - b.value();
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(b),
                  [a, b](Tape& tp, const Matrix& g, const Matrix&) {
                    tp.accumulate(a, g);
                    if (tp.needs_grad(b)) tp.accumulate(b, -g);
                  });
}

Var mul(const Var& a, const Var& b) {
  Tape& t = tape_of({&a, &b});
  require_same_shape("mul", a, b);
  Matrix out = a.value().cwiseProduct(b.value());
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(b),
                  [a, b](Tape& tp, const Matrix& g, const Matrix&) {
                    if (tp.needs_grad(a)) tp.accumulate(a, g.cwiseProduct(b.value()));
                    if (tp.needs_grad(b)) tp.accumulate(b, g.cwiseProduct(a.value()));
                  });
}

Var add_row(const Var& a, const Var& row) {
  Tape& t = tape_of({&a, &row});
  if (row.rows() != 1 || row.cols() != a.cols()) shape_mismatch("add_row", a.value(), row.value());
  Matrix out = a.value().rowwise() + row.value().row(0);
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(row),
                  [a, row](Tape& tp, const Matrix& g, const Matrix&) {
                    tp.accumulate(a, g);
                    if (tp.needs_grad(row)) tp.accumulate(row, g.colwise().sum());
                  });
}

Var broadcast_rows(const Var& row, Index n) {
  Tape& t = tape_of({&row});
  if (row.rows() != 1) {
    throw ShapeError("broadcast_rows: expected a row, got " + shape_string(row.rows(), row.cols()));
  }
  Matrix out = row.value().replicate(n, 1);
  return t.record(std::move(out), t.needs_grad(row), [row](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(row, g.colwise().sum());
  });
}

Var scale(const Var& a, double factor) {
  Tape& t = tape_of({&a});
  Matrix out = a.value() * factor;
  return t.record(std::move(out), t.needs_grad(a),
                  [a, factor](Tape& tp, const Matrix& g, const Matrix&) { tp.accumulate(a, g * factor); });
}

Var scale_by(const Var& a, const Var& s) {
  Tape& t = tape_of({&a, &s});
  if (s.rows() != 1 || s.cols() != 1) shape_mismatch("scale_by", a.value(), s.value());
  Matrix out = a.value() * s.value()(0, 0);
  return t.record(std::move(out), t.needs_grad(a) || t.needs_grad(s),
                  [a, s](Tape& tp, const Matrix& g, const Matrix&) {
                    if (tp.needs_grad(a)) tp.accumulate(a, g * s.value()(0, 0));
                    if (tp.needs_grad(s)) {
                      tp.accumulate(s, Matrix::Constant(1, 1, g.cwiseProduct(a.value()).sum()));
                    }
                  });
}

Var add_scalar(const Var& a, double c) {
  Tape& t = tape_of({&a});
  Matrix out = a.value().array() + c;
  return t.record(std::move(out), t.needs_grad(a),
                  [a](Tape& tp, const Matrix& g, const Matrix&) { tp.accumulate(a, g); });
}

Var relu(const Var& a) {
  Tape& t = tape_of({&a});
  Matrix out = a.value().cwiseMax(0.0);
  return t.record(std::move(out), t.needs_grad(a), [a](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, (a.value().array() > 0.0).select(g, 0.0));
  });
}

Var sigmoid(const Var& a) {
  Tape& t = tape_of({&a});
  Matrix out = a.value().unaryExpr([](double x) {
    // Split keeps exp() from overflowing for large |x|.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return t.record(std::move(out), t.needs_grad(a),
                  [a](Tape& tp, const Matrix& g, const Matrix& y) {
                    tp.accumulate(a, g.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
                  });
}

Var log(const Var& a) {
  Tape& t = tape_of({&a});
  Matrix out = a.value().array().log();
  return t.record(std::move(out), t.needs_grad(a), [a](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, g.cwiseQuotient(a.value()));
  });
}

Var clamp(const Var& a, double lo, double hi) {
  Tape& t = tape_of({&a});
  Matrix out = a.value().cwiseMax(lo).cwiseMin(hi);
  return t.record(std::move(out), t.needs_grad(a),
                  [a, lo, hi](Tape& tp, const Matrix& g, const Matrix&) {
                    const auto x = a.value().array();
                    tp.accumulate(a, ((x > lo) && (x < hi)).select(g, 0.0));
                  });
}

Var softmax_rows(const Var& a) {
  Tape& t = tape_of({&a});
  Matrix out = a.value();
  for (Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  return t.record(std::move(out), t.needs_grad(a),
                  [a](Tape& tp, const Matrix& g, const Matrix& y) {
                    // dx = y * (dy - <dy, y>) row by row
                    Eigen::VectorXd dots = g.cwiseProduct(y).rowwise().sum();
                    Matrix dx = y.cwiseProduct((g.colwise() - dots));
                    tp.accumulate(a, dx);
                  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  Tape* tp = parts.front().tape();
  if (tp == nullptr) throw std::invalid_argument("operation on an unbound Var");
  const Index rows = parts.front().rows();
  Index cols = 0;
  bool ng = false;
  for (const Var& p : parts) {
    tp->check_owned({&p});
    if (p.rows() != rows) shape_mismatch("concat_cols", parts.front().value(), p.value());
    cols += p.cols();
    ng = ng || tp->needs_grad(p);
  }
  Matrix out(rows, cols);
  Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tp->record(std::move(out), ng,
                    [inputs = std::move(inputs)](Tape& t, const Matrix& g, const Matrix&) {
                      Index off = 0;
                      for (const Var& p : inputs) {
                        if (t.needs_grad(p)) t.accumulate(p, g.middleCols(off, p.cols()));
                        off += p.cols();
                      }
                    });
}

Var concat_cols(std::initializer_list<Var> parts) {
  return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

Var transpose(const Var& a) {
  Tape& t = tape_of({&a});
  Matrix out = a.value().transpose();
  return t.record(std::move(out), t.needs_grad(a), [a](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, g.transpose());
  });
}

Var sum(const Var& a) {
  Tape& t = tape_of({&a});
  Matrix out = Matrix::Constant(1, 1, a.value().sum());
  return t.record(std::move(out), t.needs_grad(a), [a](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var frobenius_norm(const Var& a) {
  Tape& t = tape_of({&a});
  const double norm = a.value().norm();
  return t.record(Matrix::Constant(1, 1, norm), t.needs_grad(a),
                  [a](Tape& tp, const Matrix& g, const Matrix& y) {
                    const double n = y(0, 0);
                    if (n == 0.0) return;
                    tp.accumulate(a, a.value() * (g(0, 0) / n));
                  });
}

Var dropout(const Var& a, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return a;
  Tape& t = tape_of({&a});
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale_factor = 1.0 / (1.0 - rate);
  Matrix mask(a.rows(), a.cols());
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? scale_factor : 0.0;
  Matrix out = a.value().cwiseProduct(mask);
  return t.record(std::move(out), t.needs_grad(a),
                  [a, mask = std::move(mask)](Tape& tp, const Matrix& g, const Matrix&) {
                    tp.accumulate(a, g.cwiseProduct(mask));
                  });
}

// ---------------------------------------------------------------------------
// Optimisation

Adam::Adam(std::vector<Tensor*> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  if (!(cfg_.learning_rate > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
  first_moment_.reserve(params_.size());
  second_moment_.reserve(params_.size());
  for (const Tensor* p : params_) {
    first_moment_.push_back(Matrix::Zero(p->rows(), p->cols()));
    second_moment_.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
}

double Adam::current_learning_rate() const {
  if (cfg_.decay_interval == 0) return cfg_.learning_rate;
  const auto decays = static_cast<double>(steps_ / cfg_.decay_interval);
  return cfg_.learning_rate * std::pow(cfg_.decay_factor, decays);
}

void Adam::step() {
  const double lr = current_learning_rate();
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bias1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = *params_[i];
    if (!p.requires_grad() || !p.has_grad()) continue;
    const Matrix g = p.grad();
    Matrix& m = first_moment_[i];
    Matrix& v = second_moment_[i];
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    p.values().array() -=
        lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + cfg_.epsilon);
  }
}

void Adam::zero_grad() {
  for (Tensor* p : params_) p->zero_grad();
}

void clip_weights(std::span<Tensor* const> params, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("clip_weights: c must be positive");
  for (Tensor* p : params) p->values() = p->values().cwiseMax(-c).cwiseMin(c);
}

void glorot_uniform(Tensor& t, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Index i = 0; i < t.size(); ++i) t.values().data()[i] = dist(rng);
}

}  // namespace alice::ad
