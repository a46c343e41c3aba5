#pragma once

// Reverse-mode automatic differentiation over dense row-major matrices.
//
// A Tape records operations in creation order, which is a topological order
// of the expression graph; backward() walks it once in reverse. Persistent
// learnable state lives in Tensor objects that are bound to a tape with
// Tape::parameter(). Gradients reaching a bound Tensor accumulate into it
// until zero_grad().

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace alice::ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string shape_string(Index rows, Index cols);

/// Learnable (or frozen) matrix with a lazily allocated gradient.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Index rows, Index cols, bool requires_grad = true);
  explicit Tensor(Matrix values, bool requires_grad = true);

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  Index size() const noexcept { return values_.size(); }

  Matrix& values() noexcept { return values_; }
  const Matrix& values() const noexcept { return values_; }

  bool has_grad() const noexcept { return grad_.size() != 0; }
  /// Zero matrix of the right shape when nothing has been accumulated yet.
  Matrix grad() const;
  void accumulate_grad(const Matrix& g);
  void zero_grad();

  bool requires_grad() const noexcept { return requires_grad_; }
  void set_requires_grad(bool on) noexcept { requires_grad_ = on; }

 private:
  Matrix values_;
  Matrix grad_;
  bool requires_grad_ = true;
};

class Tape;

/// Handle to a value recorded on a tape.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  /// Value of a 1x1 var.
  double item() const;

  Tape* tape() const noexcept { return tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn =
      std::function<void(Tape&, const Matrix& out_grad, const Matrix& out_value)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Records a value that receives no gradient.
  Var constant(Matrix value);
  /// Binds a Tensor; gradients flow into it on backward() when it requires grad.
  Var parameter(Tensor& t);

  /// Records an op result. `backward` receives d(loss)/d(result) and the
  /// result value, and must route gradients to the inputs via accumulate().
  Var record(Matrix value, bool needs_grad, BackwardFn backward);

  /// Adds `g` to the gradient slot of `v` if `v` participates in backprop.
  void accumulate(const Var& v, const Matrix& g);
  bool needs_grad(const Var& v) const { return nodes_.at(v.id()).needs_grad; }

  /// Runs reverse-mode accumulation from a 1x1 loss.
  void backward(const Var& loss);

  const Matrix& value(std::size_t id) const { return nodes_.at(id).value; }
  std::size_t size() const noexcept { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  /// Throws unless every var belongs to this tape.
  void check_owned(std::initializer_list<const Var*> vars) const;

 private:
  struct Node {
    Matrix value;
    Matrix grad;  // empty until something flows in
    bool needs_grad = false;
    Tensor* param = nullptr;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Differentiable operations. All inputs must live on the same tape.

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // elementwise
/// a (n x d) + row (1 x d), the row repeated over all n rows.
Var add_row(const Var& a, const Var& row);
/// Repeats a 1 x d row n times.
Var broadcast_rows(const Var& row, Index n);
Var scale(const Var& a, double factor);
/// a * s for a 1x1 var s.
Var scale_by(const Var& a, const Var& s);
Var add_scalar(const Var& a, double c);
Var relu(const Var& a);
Var sigmoid(const Var& a);
Var log(const Var& a);
/// Clamps into [lo, hi]; gradient passes only where lo < x < hi.
Var clamp(const Var& a, double lo, double hi);
Var softmax_rows(const Var& a);
Var concat_cols(std::span<const Var> parts);
Var concat_cols(std::initializer_list<Var> parts);
Var transpose(const Var& a);
Var sum(const Var& a);
/// Frobenius norm; the subgradient at the zero matrix is taken as zero.
Var frobenius_norm(const Var& a);

/// Inverted dropout: in training mode each entry is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate). Identity otherwise.
Var dropout(const Var& a, double rate, bool training, Rng& rng);

// ---------------------------------------------------------------------------
// Optimisation

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double decay_factor = 0.5;
  std::size_t decay_interval = 0;  // steps between decays; 0 disables decay
};

/// Adam with bias correction and a step-decay learning rate schedule.
class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamConfig cfg = {});

  void step();
  void zero_grad();

  /// Learning rate the next step will use.
  double current_learning_rate() const;
  std::size_t steps() const noexcept { return steps_; }
  const AdamConfig& config() const noexcept { return cfg_; }

 private:
  std::vector<Tensor*> params_;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
  AdamConfig cfg_;
  std::size_t steps_ = 0;
};

/// Clamps every entry of every tensor into [-c, c].
void clip_weights(std::span<Tensor* const> params, double c);

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Tensor& t, Rng& rng);

}  // namespace alice::ad
