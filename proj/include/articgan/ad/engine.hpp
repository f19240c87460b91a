#pragma once

#include <span>
#include <vector>

#include "articgan/ad/tensor.hpp"

namespace artic::ad {

/// Reverse-mode gradients of a one-element `loss` with respect to `wrt`.
/// With create_graph the results are graph nodes that can be differentiated
/// again; every op on the path must then support second order. Entries for
/// tensors that do not influence the loss are zero-filled.
std::vector<Tensor> gradients(const Tensor& loss, std::span<const Tensor> wrt, bool create_graph = false);

/// Accumulates d(loss)/d(leaf) into the grad() of every requires_grad leaf.
void backward(const Tensor& loss);

/// Gradient of `loss` w.r.t. `wrt` as a differentiable node (double backprop).
Tensor grad_as_node(const Tensor& loss, const Tensor& wrt);

}  // namespace artic::ad
