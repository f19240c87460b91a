#pragma once

#include <cstddef>
#include <vector>

#include "articgan/ad/tensor.hpp"

// Differentiable operations. Every backward rule is written in terms of these
// same ops, so gradients can themselves be differentiated, except where an
// op reports has_second_order() == false.
namespace artic::ad {

// Elementwise, operands of identical shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// a / b, with 0 wherever b == 0.
Tensor safe_div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor neg(const Tensor& a);
Tensor add_scalar(const Tensor& a, double value);

/// Sum of all elements, shape {1}.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Broadcast a one-element tensor to `shape`.
Tensor expand_scalar(const Tensor& s, Shape shape);

Tensor tanh(const Tensor& x);
/// max(x, alpha*x) for alpha <= 1. The slope used at exactly x == 0 is alpha.
Tensor leaky_relu(const Tensor& x, double alpha);
inline Tensor relu(const Tensor& x) { return leaky_relu(x, 0.0); }

Tensor reshape(const Tensor& x, Shape shape);

/// [M x K] . [K x N] -> [M x N].
Tensor matmul(const Tensor& a, const Tensor& b);
/// Two-dimensional transpose.
Tensor transpose(const Tensor& a);

/// Broadcast a rank-1 tensor of length shape[axis] along every other axis.
Tensor expand_axis(const Tensor& v, Shape shape, std::size_t axis);
/// Adjoint of expand_axis: sum over every axis except `axis`.
Tensor sum_to_axis(const Tensor& x, std::size_t axis);

/// x[B x I] . w[I x O] + b[O].
Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b);
/// Adds b[C] to every position of x[B x C x L].
Tensor add_channel_bias(const Tensor& x, const Tensor& b);

/// Valid cross-correlation. x[B x C x L], k[F x C x K] -> [B x F x ((L-K)/stride + 1)].
Tensor conv1d(const Tensor& x, const Tensor& k, std::size_t stride);
/// Input gradient of conv1d (raw transposed convolution): gy[B x F x L'],
/// k[F x C x K] -> [B x C x length]. Requires (length-K)/stride + 1 == L'.
Tensor conv1d_input_grad(const Tensor& gy, const Tensor& k, std::size_t stride, std::size_t length);
/// Kernel gradient of conv1d: x[B x C x L], gy[B x F x L'] -> [F x C x ksize].
Tensor conv1d_kernel_grad(const Tensor& x, const Tensor& gy, std::size_t stride, std::size_t ksize);

/// Untrimmed transposed convolution: x[B x C x L], k[C x F x K] ->
/// [B x F x ((L-1)*stride + K)].
Tensor conv1d_transpose_raw(const Tensor& x, const Tensor& k, std::size_t stride);
/// Transposed convolution with output length stride*L. The raw result is
/// cropped (or zero-padded when K < stride) by floor(|K - stride| / 2) on the
/// left and the remainder on the right.
Tensor conv1d_transpose(const Tensor& x, const Tensor& k, std::size_t stride);
/// Zero padding that makes conv1d(pad_same(x), k, stride) the adjoint of
/// conv1d_transpose(., k, stride); output length ceil(L / stride).
Tensor conv1d_same(const Tensor& x, const Tensor& k, std::size_t stride);

/// Window of the last axis: y[..., i] = x[..., i + offset], zero outside x.
Tensor window_last(const Tensor& x, std::ptrdiff_t offset, std::size_t length);

/// y[..., i] = x[..., index[i]] along the last axis.
Tensor gather_last(const Tensor& x, std::vector<std::size_t> index);
/// Adjoint of gather_last: y[..., index[i]] += g[..., i], y has `length` columns.
Tensor scatter_last(const Tensor& g, std::vector<std::size_t> index, std::size_t length);

/// Euclidean norm of each leading-axis slice: x[B x ...] -> [B].
/// The gradient at a zero slice is taken as zero.
Tensor row_norm(const Tensor& x);

}  // namespace artic::ad
