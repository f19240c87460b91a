#include "articgan/ad/tensor.hpp"

#include <functional>
#include <numeric>
#include <sstream>

#include "articgan/error.hpp"

namespace artic::ad {

namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  for (auto extent : shape) {
    if (extent == 0) throw ContractViolation("tensor extents must be positive, got " + to_string(shape));
  }
  if (ad::numel(shape) != data.size()) {
    throw ContractViolation("tensor data length " + std::to_string(data.size()) +
                            " does not match shape " + to_string(shape));
  }
  impl_ = std::make_shared<TensorImpl>();
  impl_->shape = std::move(shape);
  impl_->data = std::move(data);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = ad::numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({1}, {value}, requires_grad); }

Tensor Tensor::from(Shape shape, std::initializer_list<double> values, bool requires_grad) {
  return Tensor(std::move(shape), std::vector<double>(values), requires_grad);
}

const Shape& Tensor::shape() const { return impl_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= impl_->shape.size()) throw ContractViolation("axis out of range");
  return impl_->shape[axis];
}

std::size_t Tensor::numel() const { return impl_->data.size(); }

std::span<const double> Tensor::data() const { return impl_->data; }

std::span<double> Tensor::mutable_data() { return impl_->data; }

double Tensor::item() const {
  if (numel() != 1) throw ContractViolation("item() needs a one-element tensor, got " + to_string(shape()));
  return impl_->data[0];
}

bool Tensor::requires_grad() const { return impl_->requires_grad; }

bool Tensor::is_leaf() const { return impl_->grad_fn == nullptr; }

void Tensor::set_requires_grad(bool flag) {
  if (!is_leaf()) throw ContractViolation("requires_grad can only be changed on leaf tensors");
  impl_->requires_grad = flag;
  if (!flag) impl_->grad.reset();
}

Tensor Tensor::grad() const { return impl_->grad ? Tensor(impl_->grad) : Tensor(); }

void Tensor::zero_grad() { impl_->grad.reset(); }

Tensor Tensor::detach() const { return Tensor(impl_->shape, impl_->data, false); }

const std::shared_ptr<Node>& Tensor::grad_fn() const { return impl_->grad_fn; }

void attach(Tensor& out, std::shared_ptr<Node> node) {
  out.impl_->grad_fn = std::move(node);
  out.impl_->requires_grad = true;
}

void accumulate_leaf_grad(const Tensor& leaf, const Tensor& grad) {
  auto& slot = leaf.impl_->grad;
  if (!slot) {
    slot = std::make_shared<TensorImpl>();
    slot->shape = grad.shape();
    slot->data.assign(grad.data().begin(), grad.data().end());
    return;
  }
  auto src = grad.data();
  for (std::size_t i = 0; i < src.size(); ++i) slot->data[i] += src[i];
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

GradModeGuard::GradModeGuard(bool enabled) : previous_(g_grad_enabled) { g_grad_enabled = enabled; }
GradModeGuard::~GradModeGuard() { g_grad_enabled = previous_; }

bool needs_graph(std::initializer_list<const Tensor*> inputs) {
  if (!g_grad_enabled) return false;
  for (const Tensor* t : inputs) {
    if (t->defined() && t->requires_grad()) return true;
  }
  return false;
}

}  // namespace artic::ad
