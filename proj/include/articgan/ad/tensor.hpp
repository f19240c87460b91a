#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace artic::ad {

using Shape = std::vector<std::size_t>;
/// Per-input flags telling a backward rule which gradients are wanted.
using Needs = std::vector<bool>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

class Node;

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  bool requires_grad = false;
  std::shared_ptr<Node> grad_fn;
  std::shared_ptr<TensorImpl> grad;
};

/// Handle to a row-major array of doubles that may sit on a computation graph.
/// Copies share storage; use clone() or detach() for an independent array.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::initializer_list<double> values, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  /// Direct write access; only valid on leaves that are not part of a live graph.
  std::span<double> mutable_data();
  double operator[](std::size_t i) const { return impl_->data[i]; }
  double item() const;

  bool requires_grad() const;
  bool is_leaf() const;
  void set_requires_grad(bool flag);

  /// Gradient accumulated by backward(); undefined until the first call.
  Tensor grad() const;
  void zero_grad();

  /// Same values, no graph, no grad requirement.
  Tensor detach() const;
  Tensor clone() const { return detach(); }

  const std::shared_ptr<Node>& grad_fn() const;
  TensorImpl* impl() const { return impl_.get(); }

  friend void attach(Tensor& out, std::shared_ptr<Node> node);
  friend void accumulate_leaf_grad(const Tensor& leaf, const Tensor& grad);

 private:
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<TensorImpl> impl_;
};

/// An op record: holds its inputs (never its output, so the graph owns no
/// cycles) and produces input gradients from the output gradient.
class Node {
 public:
  explicit Node(std::vector<Tensor> inputs) : inputs_(std::move(inputs)) {}
  virtual ~Node() = default;
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  virtual const char* name() const = 0;
  /// Whether backward() is built from differentiable ops (double backprop).
  virtual bool has_second_order() const { return true; }
  /// One entry per input; undefined where the input needs no gradient.
  virtual std::vector<Tensor> backward(const Tensor& grad_out, const Tensor& out, const Needs& needs) const = 0;

  const std::vector<Tensor>& inputs() const { return inputs_; }

 private:
  std::vector<Tensor> inputs_;
};

bool grad_enabled();

/// Disables graph recording for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Sets graph recording to `enabled` for its lifetime.
class GradModeGuard {
 public:
  explicit GradModeGuard(bool enabled);
  ~GradModeGuard();
  GradModeGuard(const GradModeGuard&) = delete;
  GradModeGuard& operator=(const GradModeGuard&) = delete;

 private:
  bool previous_;
};

/// True when recording is on and any input requires a gradient.
bool needs_graph(std::initializer_list<const Tensor*> inputs);

}  // namespace artic::ad
