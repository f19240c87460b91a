#include "articgan/ad/ops.hpp"

#include <Eigen/Core>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "articgan/error.hpp"

namespace artic::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

void require(bool ok, const std::string& message) {
  if (!ok) throw ContractViolation(message);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.defined() && b.defined(), std::string(op) + ": undefined operand");
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                                      to_string(b.shape()));
}

template <class NodeT, class... Args>
void record(Tensor& out, std::vector<Tensor> inputs, Args&&... args) {
  attach(out, std::make_shared<NodeT>(std::move(inputs), std::forward<Args>(args)...));
}

// ---------------------------------------------------------------- elementwise

struct AddNode final : Node {
  using Node::Node;
  const char* name() const override { return "add"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {g, g}; }
};

struct SubNode final : Node {
  using Node::Node;
  const char* name() const override { return "sub"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs& needs) const override { return {g, needs[1] ? neg(g) : Tensor()}; }
};

struct MulNode final : Node {
  using Node::Node;
  const char* name() const override { return "mul"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs& needs) const override {
    const auto& a = inputs()[0];
    const auto& b = inputs()[1];
    return {needs[0] ? mul(g, b) : Tensor(), needs[1] ? mul(g, a) : Tensor()};
  }
};

struct SafeDivNode final : Node {
  using Node::Node;
  const char* name() const override { return "safe_div"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor& out, const Needs& needs) const override {
    const auto& b = inputs()[1];
    return {needs[0] ? safe_div(g, b) : Tensor(),
            needs[1] ? neg(safe_div(mul(g, out), b)) : Tensor()};
  }
};

struct ScaleNode final : Node {
  ScaleNode(std::vector<Tensor> in, double factor) : Node(std::move(in)), factor(factor) {}
  const char* name() const override { return "scale"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {scale(g, factor)}; }
  double factor;
};

struct PassNode final : Node {
  using Node::Node;
  const char* name() const override { return "add_scalar"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {g}; }
};

template <class F>
Tensor binary(const Tensor& a, const Tensor& b, const char* op, F f) {
  require_same_shape(a, b, op);
  std::vector<double> out(a.numel());
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i], y[i]);
  return Tensor(a.shape(), std::move(out));
}

template <class F>
Tensor unary(const Tensor& a, F f) {
  std::vector<double> out(a.numel());
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
  return Tensor(a.shape(), std::move(out));
}

// ---------------------------------------------------------------- reductions

struct SumNode final : Node {
  SumNode(std::vector<Tensor> in, Shape shape) : Node(std::move(in)), shape(std::move(shape)) {}
  const char* name() const override { return "sum"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {expand_scalar(g, shape)}; }
  Shape shape;
};

struct ExpandScalarNode final : Node {
  using Node::Node;
  const char* name() const override { return "expand_scalar"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {sum(g)}; }
};

// ---------------------------------------------------------------- nonlinear

struct TanhNode final : Node {
  using Node::Node;
  const char* name() const override { return "tanh"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor& out, const Needs&) const override {
    return {mul(g, add_scalar(neg(mul(out, out)), 1.0))};
  }
};

struct LeakyReluNode final : Node {
  LeakyReluNode(std::vector<Tensor> in, Tensor slope) : Node(std::move(in)), slope(std::move(slope)) {}
  const char* name() const override { return "leaky_relu"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {mul(g, slope)}; }
  Tensor slope;
};

// ---------------------------------------------------------------- layout

struct ReshapeNode final : Node {
  ReshapeNode(std::vector<Tensor> in, Shape shape) : Node(std::move(in)), shape(std::move(shape)) {}
  const char* name() const override { return "reshape"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {reshape(g, shape)}; }
  Shape shape;
};

struct MatmulNode final : Node {
  using Node::Node;
  const char* name() const override { return "matmul"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs& needs) const override {
    const auto& a = inputs()[0];
    const auto& b = inputs()[1];
    return {needs[0] ? matmul(g, transpose(b)) : Tensor(),
            needs[1] ? matmul(transpose(a), g) : Tensor()};
  }
};

struct TransposeNode final : Node {
  using Node::Node;
  const char* name() const override { return "transpose"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {transpose(g)}; }
};

struct ExpandAxisNode final : Node {
  ExpandAxisNode(std::vector<Tensor> in, std::size_t axis) : Node(std::move(in)), axis(axis) {}
  const char* name() const override { return "expand_axis"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {sum_to_axis(g, axis)}; }
  std::size_t axis;
};

struct SumToAxisNode final : Node {
  SumToAxisNode(std::vector<Tensor> in, Shape shape, std::size_t axis)
      : Node(std::move(in)), shape(std::move(shape)), axis(axis) {}
  const char* name() const override { return "sum_to_axis"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override {
    return {expand_axis(g, shape, axis)};
  }
  Shape shape;
  std::size_t axis;
};

// outer x extent x inner decomposition around `axis`.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// ---------------------------------------------------------------- conv

struct Conv1dNode final : Node {
  Conv1dNode(std::vector<Tensor> in, std::size_t stride) : Node(std::move(in)), stride(stride) {}
  const char* name() const override { return "conv1d"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs& needs) const override {
    const auto& x = inputs()[0];
    const auto& k = inputs()[1];
    return {needs[0] ? conv1d_input_grad(g, k, stride, x.dim(2)) : Tensor(),
            needs[1] ? conv1d_kernel_grad(x, g, stride, k.dim(2)) : Tensor()};
  }
  std::size_t stride;
};

struct ConvInputGradNode final : Node {
  ConvInputGradNode(std::vector<Tensor> in, std::size_t stride) : Node(std::move(in)), stride(stride) {}
  const char* name() const override { return "conv1d_input_grad"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs& needs) const override {
    const auto& gy = inputs()[0];
    const auto& k = inputs()[1];
    return {needs[0] ? conv1d(g, k, stride) : Tensor(),
            needs[1] ? conv1d_kernel_grad(g, gy, stride, k.dim(2)) : Tensor()};
  }
  std::size_t stride;
};

struct ConvKernelGradNode final : Node {
  ConvKernelGradNode(std::vector<Tensor> in, std::size_t stride) : Node(std::move(in)), stride(stride) {}
  const char* name() const override { return "conv1d_kernel_grad"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs& needs) const override {
    const auto& x = inputs()[0];
    const auto& gy = inputs()[1];
    return {needs[0] ? conv1d_input_grad(gy, g, stride, x.dim(2)) : Tensor(),
            needs[1] ? conv1d(x, g, stride) : Tensor()};
  }
  std::size_t stride;
};

// Column matrix [C*K x Lo] of one batch item: col[(c,kk), t] = x[c, t*stride + kk].
void im2col(const double* x, std::size_t channels, std::size_t length, std::size_t ksize, std::size_t stride,
            std::size_t out_len, double* col) {
  for (std::size_t c = 0; c < channels; ++c) {
    const double* xc = x + c * length;
    for (std::size_t kk = 0; kk < ksize; ++kk) {
      double* row = col + (c * ksize + kk) * out_len;
      const double* src = xc + kk;
      for (std::size_t t = 0; t < out_len; ++t) row[t] = src[t * stride];
    }
  }
}

void col2im_add(const double* col, std::size_t channels, std::size_t length, std::size_t ksize,
                std::size_t stride, std::size_t out_len, double* x) {
  for (std::size_t c = 0; c < channels; ++c) {
    double* xc = x + c * length;
    for (std::size_t kk = 0; kk < ksize; ++kk) {
      const double* row = col + (c * ksize + kk) * out_len;
      double* dst = xc + kk;
      for (std::size_t t = 0; t < out_len; ++t) dst[t * stride] += row[t];
    }
  }
}

// ---------------------------------------------------------------- indexing

struct WindowNode final : Node {
  WindowNode(std::vector<Tensor> in, std::ptrdiff_t offset, std::size_t in_len)
      : Node(std::move(in)), offset(offset), in_len(in_len) {}
  const char* name() const override { return "window_last"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override {
    return {window_last(g, -offset, in_len)};
  }
  std::ptrdiff_t offset;
  std::size_t in_len;
};

struct GatherNode final : Node {
  GatherNode(std::vector<Tensor> in, std::vector<std::size_t> index, std::size_t in_len)
      : Node(std::move(in)), index(std::move(index)), in_len(in_len) {}
  const char* name() const override { return "gather_last"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override {
    return {scatter_last(g, index, in_len)};
  }
  std::vector<std::size_t> index;
  std::size_t in_len;
};

struct ScatterNode final : Node {
  ScatterNode(std::vector<Tensor> in, std::vector<std::size_t> index) : Node(std::move(in)), index(std::move(index)) {}
  const char* name() const override { return "scatter_last"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor&, const Needs&) const override { return {gather_last(g, index)}; }
  std::vector<std::size_t> index;
};

struct RowNormNode final : Node {
  using Node::Node;
  const char* name() const override { return "row_norm"; }
  std::vector<Tensor> backward(const Tensor& g, const Tensor& out, const Needs&) const override {
    const auto& x = inputs()[0];
    return {mul(x, expand_axis(safe_div(g, out), x.shape(), 0))};
  }
};

Shape with_last(Shape shape, std::size_t last) {
  shape.back() = last;
  return shape;
}

}  // namespace

// ================================================================ elementwise

Tensor add(const Tensor& a, const Tensor& b) {
  Tensor out = binary(a, b, "add", [](double x, double y) { return x + y; });
  if (needs_graph({&a, &b})) record<AddNode>(out, {a, b});
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  Tensor out = binary(a, b, "sub", [](double x, double y) { return x - y; });
  if (needs_graph({&a, &b})) record<SubNode>(out, {a, b});
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  Tensor out = binary(a, b, "mul", [](double x, double y) { return x * y; });
  if (needs_graph({&a, &b})) record<MulNode>(out, {a, b});
  return out;
}

Tensor safe_div(const Tensor& a, const Tensor& b) {
  Tensor out = binary(a, b, "safe_div", [](double x, double y) { return y == 0.0 ? 0.0 : x / y; });
  if (needs_graph({&a, &b})) record<SafeDivNode>(out, {a, b});
  return out;
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = unary(a, [factor](double x) { return x * factor; });
  if (needs_graph({&a})) record<ScaleNode>(out, {a}, factor);
  return out;
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor add_scalar(const Tensor& a, double value) {
  Tensor out = unary(a, [value](double x) { return x + value; });
  if (needs_graph({&a})) record<PassNode>(out, {a});
  return out;
}

// ================================================================ reductions

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  Tensor out = Tensor::scalar(total);
  if (needs_graph({&a})) record<SumNode>(out, {a}, a.shape());
  return out;
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

Tensor expand_scalar(const Tensor& s, Shape shape) {
  require(s.numel() == 1, "expand_scalar: operand must have one element");
  Tensor out = Tensor::full(std::move(shape), s[0]);
  if (needs_graph({&s})) record<ExpandScalarNode>(out, {s});
  return out;
}

// ================================================================ nonlinear

Tensor tanh(const Tensor& x) {
  Tensor out = unary(x, [](double v) { return std::tanh(v); });
  if (needs_graph({&x})) record<TanhNode>(out, {x});
  return out;
}

Tensor leaky_relu(const Tensor& x, double alpha) {
  require(alpha <= 1.0, "leaky_relu: alpha must be <= 1");
  Tensor out = unary(x, [alpha](double v) { return v > 0.0 ? v : alpha * v; });
  if (needs_graph({&x})) {
    Tensor slope = unary(x, [alpha](double v) { return v > 0.0 ? 1.0 : alpha; });
    record<LeakyReluNode>(out, {x}, std::move(slope));
  }
  return out;
}

// ================================================================ layout

Tensor reshape(const Tensor& x, Shape shape) {
  require(numel(shape) == x.numel(),
          "reshape: cannot view " + to_string(x.shape()) + " as " + to_string(shape));
  Tensor out(std::move(shape), std::vector<double>(x.data().begin(), x.data().end()));
  if (needs_graph({&x})) record<ReshapeNode>(out, {x}, x.shape());
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2, "matmul: operands must be two-dimensional");
  require(a.dim(1) == b.dim(0),
          "matmul: inner dimensions differ, " + to_string(a.shape()) + " . " + to_string(b.shape()));
  const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n);
  MutMap(out.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)).noalias() =
      ConstMap(a.data().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) *
      ConstMap(b.data().data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  Tensor result({m, n}, std::move(out));
  if (needs_graph({&a, &b})) record<MatmulNode>(result, {a, b});
  return result;
}

Tensor transpose(const Tensor& a) {
  require(a.rank() == 2, "transpose: operand must be two-dimensional");
  const auto m = a.dim(0), n = a.dim(1);
  std::vector<double> out(m * n);
  auto src = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = src[i * n + j];
  Tensor result({n, m}, std::move(out));
  if (needs_graph({&a})) record<TransposeNode>(result, {a});
  return result;
}

Tensor expand_axis(const Tensor& v, Shape shape, std::size_t axis) {
  require(axis < shape.size(), "expand_axis: axis out of range");
  require(v.rank() == 1 && v.dim(0) == shape[axis],
          "expand_axis: vector " + to_string(v.shape()) + " does not fit axis " + std::to_string(axis) + " of " +
              to_string(shape));
  const auto s = split_at(shape, axis);
  std::vector<double> out(numel(shape));
  auto src = v.data();
  std::size_t pos = 0;
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t c = 0; c < s.extent; ++c)
      for (std::size_t i = 0; i < s.inner; ++i) out[pos++] = src[c];
  Tensor result(std::move(shape), std::move(out));
  if (needs_graph({&v})) record<ExpandAxisNode>(result, {v}, axis);
  return result;
}

Tensor sum_to_axis(const Tensor& x, std::size_t axis) {
  require(axis < x.rank(), "sum_to_axis: axis out of range");
  const auto s = split_at(x.shape(), axis);
  std::vector<double> out(s.extent, 0.0);
  auto src = x.data();
  std::size_t pos = 0;
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t c = 0; c < s.extent; ++c)
      for (std::size_t i = 0; i < s.inner; ++i) out[c] += src[pos++];
  Tensor result({s.extent}, std::move(out));
  if (needs_graph({&x})) record<SumToAxisNode>(result, {x}, x.shape(), axis);
  return result;
}

Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(x.rank() == 2 && w.rank() == 2 && b.rank() == 1, "dense: expected x[BxI], w[IxO], b[O]");
  require(x.dim(1) == w.dim(0) && w.dim(1) == b.dim(0),
          "dense: shape mismatch " + to_string(x.shape()) + ", " + to_string(w.shape()) + ", " +
              to_string(b.shape()));
  Tensor y = matmul(x, w);
  return add(y, expand_axis(b, y.shape(), 1));
}

Tensor add_channel_bias(const Tensor& x, const Tensor& b) {
  require(x.rank() == 3, "add_channel_bias: expected x[BxCxL]");
  return add(x, expand_axis(b, x.shape(), 1));
}

// ================================================================ conv

Tensor conv1d(const Tensor& x, const Tensor& k, std::size_t stride) {
  require(x.rank() == 3 && k.rank() == 3, "conv1d: expected x[BxCxL] and k[FxCxK]");
  require(stride >= 1, "conv1d: stride must be >= 1");
  require(x.dim(1) == k.dim(1), "conv1d: channel mismatch " + to_string(x.shape()) + " vs " + to_string(k.shape()));
  const auto batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  const auto filters = k.dim(0), ksize = k.dim(2);
  require(ksize <= length, "conv1d: kernel length " + std::to_string(ksize) + " exceeds input length " +
                               std::to_string(length));
  const auto out_len = (length - ksize) / stride + 1;
  const auto ck = channels * ksize;
  std::vector<double> out(batch * filters * out_len);
  std::vector<double> col(ck * out_len);
  const ConstMap kernel(k.data().data(), static_cast<Eigen::Index>(filters), static_cast<Eigen::Index>(ck));
  for (std::size_t b = 0; b < batch; ++b) {
    im2col(x.data().data() + b * channels * length, channels, length, ksize, stride, out_len, col.data());
    MutMap(out.data() + b * filters * out_len, static_cast<Eigen::Index>(filters),
           static_cast<Eigen::Index>(out_len))
        .noalias() = kernel * ConstMap(col.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(out_len));
  }
  Tensor result({batch, filters, out_len}, std::move(out));
  if (needs_graph({&x, &k})) record<Conv1dNode>(result, {x, k}, stride);
  return result;
}

Tensor conv1d_input_grad(const Tensor& gy, const Tensor& k, std::size_t stride, std::size_t length) {
  require(gy.rank() == 3 && k.rank() == 3, "conv1d_input_grad: expected gy[BxFxL'] and k[FxCxK]");
  require(stride >= 1, "conv1d_input_grad: stride must be >= 1");
  require(gy.dim(1) == k.dim(0), "conv1d_input_grad: filter mismatch " + to_string(gy.shape()) + " vs " +
                                     to_string(k.shape()));
  const auto batch = gy.dim(0), filters = gy.dim(1), out_len = gy.dim(2);
  const auto channels = k.dim(1), ksize = k.dim(2);
  require(ksize <= length && (length - ksize) / stride + 1 == out_len,
          "conv1d_input_grad: length " + std::to_string(length) + " inconsistent with " +
              std::to_string(out_len) + " outputs");
  const auto ck = channels * ksize;
  std::vector<double> out(batch * channels * length, 0.0);
  std::vector<double> col(ck * out_len);
  const ConstMap kernel(k.data().data(), static_cast<Eigen::Index>(filters), static_cast<Eigen::Index>(ck));
  for (std::size_t b = 0; b < batch; ++b) {
    MutMap(col.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(out_len)).noalias() =
        kernel.transpose() * ConstMap(gy.data().data() + b * filters * out_len, static_cast<Eigen::Index>(filters),
                                      static_cast<Eigen::Index>(out_len));
    col2im_add(col.data(), channels, length, ksize, stride, out_len, out.data() + b * channels * length);
  }
  Tensor result({batch, channels, length}, std::move(out));
  if (needs_graph({&gy, &k})) record<ConvInputGradNode>(result, {gy, k}, stride);
  return result;
}

Tensor conv1d_kernel_grad(const Tensor& x, const Tensor& gy, std::size_t stride, std::size_t ksize) {
  require(x.rank() == 3 && gy.rank() == 3, "conv1d_kernel_grad: expected x[BxCxL] and gy[BxFxL']");
  require(stride >= 1, "conv1d_kernel_grad: stride must be >= 1");
  require(x.dim(0) == gy.dim(0), "conv1d_kernel_grad: batch mismatch");
  const auto batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  const auto filters = gy.dim(1), out_len = gy.dim(2);
  require(ksize >= 1 && ksize <= length && (length - ksize) / stride + 1 == out_len,
          "conv1d_kernel_grad: kernel length " + std::to_string(ksize) + " inconsistent with shapes");
  const auto ck = channels * ksize;
  std::vector<double> out(filters * ck, 0.0);
  std::vector<double> col(ck * out_len);
  MutMap grad(out.data(), static_cast<Eigen::Index>(filters), static_cast<Eigen::Index>(ck));
  for (std::size_t b = 0; b < batch; ++b) {
    im2col(x.data().data() + b * channels * length, channels, length, ksize, stride, out_len, col.data());
    grad.noalias() +=
        ConstMap(gy.data().data() + b * filters * out_len, static_cast<Eigen::Index>(filters),
                 static_cast<Eigen::Index>(out_len)) *
        ConstMap(col.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(out_len)).transpose();
  }
  Tensor result({filters, channels, ksize}, std::move(out));
  if (needs_graph({&x, &gy})) record<ConvKernelGradNode>(result, {x, gy}, stride);
  return result;
}

Tensor conv1d_transpose_raw(const Tensor& x, const Tensor& k, std::size_t stride) {
  require(x.rank() == 3 && k.rank() == 3, "conv1d_transpose: expected x[BxCxL] and k[CxFxK]");
  require(stride >= 1, "conv1d_transpose: stride must be >= 1");
  require(x.dim(1) == k.dim(0),
          "conv1d_transpose: channel mismatch " + to_string(x.shape()) + " vs " + to_string(k.shape()));
  const auto raw_len = (x.dim(2) - 1) * stride + k.dim(2);
  return conv1d_input_grad(x, k, stride, raw_len);
}

Tensor conv1d_transpose(const Tensor& x, const Tensor& k, std::size_t stride) {
  Tensor raw = conv1d_transpose_raw(x, k, stride);
  const auto ksize = static_cast<std::ptrdiff_t>(k.dim(2));
  const auto s = static_cast<std::ptrdiff_t>(stride);
  const std::ptrdiff_t offset = ksize >= s ? (ksize - s) / 2 : -((s - ksize) / 2);
  return window_last(raw, offset, stride * x.dim(2));
}

Tensor conv1d_same(const Tensor& x, const Tensor& k, std::size_t stride) {
  require(x.rank() == 3 && k.rank() == 3, "conv1d_same: expected x[BxCxL] and k[FxCxK]");
  require(stride >= 1, "conv1d_same: stride must be >= 1");
  const auto length = static_cast<std::ptrdiff_t>(x.dim(2));
  const auto s = static_cast<std::ptrdiff_t>(stride);
  const auto out_len = (length + s - 1) / s;
  const auto needed = (out_len - 1) * s + static_cast<std::ptrdiff_t>(k.dim(2));
  const auto excess = needed - length;
  const std::ptrdiff_t offset = excess >= 0 ? -(excess / 2) : (-excess) / 2;
  return conv1d(window_last(x, offset, static_cast<std::size_t>(needed)), k, stride);
}

// ================================================================ indexing

Tensor window_last(const Tensor& x, std::ptrdiff_t offset, std::size_t length) {
  require(x.rank() >= 1 && length >= 1, "window_last: invalid arguments");
  const auto in_len = x.shape().back();
  const auto rows = x.numel() / in_len;
  std::vector<double> out(rows * length, 0.0);
  auto src = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = src.data() + r * in_len;
    double* dst = out.data() + r * length;
    for (std::size_t i = 0; i < length; ++i) {
      const auto j = static_cast<std::ptrdiff_t>(i) + offset;
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(in_len)) dst[i] = in[j];
    }
  }
  Tensor result(with_last(x.shape(), length), std::move(out));
  if (needs_graph({&x})) record<WindowNode>(result, {x}, offset, in_len);
  return result;
}

Tensor gather_last(const Tensor& x, std::vector<std::size_t> index) {
  require(x.rank() >= 1 && !index.empty(), "gather_last: invalid arguments");
  const auto in_len = x.shape().back();
  for (auto i : index) require(i < in_len, "gather_last: index out of range");
  const auto rows = x.numel() / in_len;
  const auto out_len = index.size();
  std::vector<double> out(rows * out_len);
  auto src = x.data();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t i = 0; i < out_len; ++i) out[r * out_len + i] = src[r * in_len + index[i]];
  Tensor result(with_last(x.shape(), out_len), std::move(out));
  if (needs_graph({&x})) record<GatherNode>(result, {x}, std::move(index), in_len);
  return result;
}

Tensor scatter_last(const Tensor& g, std::vector<std::size_t> index, std::size_t length) {
  require(g.rank() >= 1 && g.shape().back() == index.size(), "scatter_last: index length mismatch");
  for (auto i : index) require(i < length, "scatter_last: index out of range");
  const auto in_len = index.size();
  const auto rows = g.numel() / in_len;
  std::vector<double> out(rows * length, 0.0);
  auto src = g.data();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t i = 0; i < in_len; ++i) out[r * length + index[i]] += src[r * in_len + i];
  Tensor result(with_last(g.shape(), length), std::move(out));
  if (needs_graph({&g})) record<ScatterNode>(result, {g}, std::move(index));
  return result;
}

Tensor row_norm(const Tensor& x) {
  require(x.rank() >= 1, "row_norm: operand must have a leading axis");
  const auto rows = x.dim(0);
  const auto width = x.numel() / rows;
  std::vector<double> out(rows);
  auto src = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < width; ++i) acc += src[r * width + i] * src[r * width + i];
    out[r] = std::sqrt(acc);
  }
  Tensor result({rows}, std::move(out));
  if (needs_graph({&x})) record<RowNormNode>(result, {x});
  return result;
}

}  // namespace artic::ad
