#pragma once

// Minimal reverse-mode automatic differentiation over dense row-major tensors.
//
// A Tensor is a shared handle to a value buffer plus an optional gradient
// buffer. Operations are methods on a Tape; when any input requires a
// gradient (and the tape is recording) the op appends its backward rule to
// the tape. Tape::backward() replays those rules in reverse order and
// accumulates into every participating tensor's gradient.
//
// Tensors are at most rank 2. Rank-1 tensors of length n broadcast like a
// [1, n] row; reductions return rank-0 scalars.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rapida/common.hpp"

namespace rapida::tensor {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
};

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  // [1, n] row vector.
  static Tensor row(std::vector<double> values, bool requires_grad = false);
  // [rows, cols] built from a flat row-major buffer.
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t numel() const { return node_->value.size(); }

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  double item() const;
  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on);
  // Gradient buffer; zero-filled when the tensor has not received any gradient.
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  // Deep copy with no tape history.
  Tensor clone() const;

  TensorNode* node() const { return node_.get(); }
  const std::shared_ptr<TensorNode>& shared() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<TensorNode> node_;
};

class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }
  std::size_t size() const { return backward_.size(); }
  void clear() { backward_.clear(); }

  Tensor matmul(const Tensor& a, const Tensor& b);
  // Elementwise; b may also be a row broadcast across the rows of a.
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  Tensor scale(const Tensor& a, double s);
  // Concatenation along the last axis; all parts share the row count.
  Tensor concat(const std::vector<Tensor>& parts);
  Tensor tanh(const Tensor& a);
  Tensor relu(const Tensor& a);
  Tensor exp(const Tensor& a);
  Tensor square(const Tensor& a);
  Tensor clamp(const Tensor& a, double lo, double hi);
  Tensor minimum(const Tensor& a, const Tensor& b);
  // Diagonal Gaussian log-density of each action row: returns [rows, 1].
  // log_std is a row broadcast across the batch.
  Tensor gaussian_log_prob(const Tensor& actions, const Tensor& mean, const Tensor& log_std);
  Tensor mean(const Tensor& a);
  Tensor sum(const Tensor& a);
  // Mean absolute error; the target never receives gradient.
  Tensor l1_loss(const Tensor& predicted, const Tensor& target);
  Tensor stop_gradient(const Tensor& a);

  // Seeds d(loss)/d(loss) = 1 and replays the recorded rules in reverse.
  void backward(const Tensor& loss);

 private:
  bool tracks(std::initializer_list<const Tensor*> inputs) const;
  Tensor make_output(Shape shape, bool tracked) const;
  void record(std::function<void()> rule) { backward_.push_back(std::move(rule)); }

  bool recording_;
  std::vector<std::function<void()>> backward_;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};
using ParameterList = std::vector<NamedTensor>;

void zero_grad(const ParameterList& params);
// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_grad_norm(const ParameterList& params, double max_norm);
double grad_norm(const ParameterList& params);

// Fully connected network: tanh between layers, identity on the output.
class Mlp {
 public:
  Mlp() = default;
  // He-uniform weights (bound sqrt(6 / fan_in)), zero biases. The last
  // layer's weights are multiplied by output_gain.
  Mlp(std::vector<std::size_t> dims, Rng& rng, double output_gain = 1.0);
  static Mlp zeros(std::vector<std::size_t> dims);

  Tensor forward(Tape& tape, const Tensor& input) const;

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_width() const { return dims_.front(); }
  std::size_t output_width() const { return dims_.back(); }
  std::size_t parameter_count() const;
  bool empty() const { return dims_.empty(); }

  std::vector<Tensor>& weights() { return weights_; }
  std::vector<Tensor>& biases() { return biases_; }
  const std::vector<Tensor>& weights() const { return weights_; }
  const std::vector<Tensor>& biases() const { return biases_; }

  void collect_parameters(const std::string& prefix, ParameterList& out) const;
  Mlp clone() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// One bias-corrected Adam update using the gradients stored on params.
void adam_step(const ParameterList& params, AdamState& state);

}  // namespace rapida::tensor
