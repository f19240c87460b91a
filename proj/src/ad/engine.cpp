#include "articgan/ad/engine.hpp"

#include <string>
#include <unordered_map>
#include <unordered_set>

#include "articgan/ad/ops.hpp"
#include "articgan/error.hpp"

namespace artic::ad {

namespace {

// Post-order over graph tensors reachable from root: inputs precede consumers.
std::vector<Tensor> topological_order(const Tensor& root) {
  std::vector<Tensor> order;
  std::unordered_set<const TensorImpl*> visited;
  struct Frame {
    Tensor tensor;
    std::size_t next_input;
  };
  std::vector<Frame> stack;
  stack.push_back({root, 0});
  visited.insert(root.impl());
  while (!stack.empty()) {
    auto& frame = stack.back();
    const auto& fn = frame.tensor.grad_fn();
    if (fn && frame.next_input < fn->inputs().size()) {
      const Tensor& input = fn->inputs()[frame.next_input++];
      if (input.defined() && input.requires_grad() && visited.insert(input.impl()).second) {
        stack.push_back({input, 0});
      }
      continue;
    }
    order.push_back(frame.tensor);
    stack.pop_back();
  }
  return order;
}

using GradMap = std::unordered_map<const TensorImpl*, Tensor>;

void accumulate(GradMap& grads, const TensorImpl* key, const Tensor& g) {
  auto it = grads.find(key);
  if (it == grads.end()) {
    grads.emplace(key, g);
  } else {
    it->second = add(it->second, g);
  }
}

// Runs the reverse sweep. `is_target` selects tensors whose gradient is wanted;
// only nodes with a target upstream are expanded.
GradMap reverse_sweep(const Tensor& loss, const std::unordered_set<const TensorImpl*>& targets, bool all_leaves,
                      bool create_graph) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractViolation("backward: loss must be a one-element tensor, got " +
                            (loss.defined() ? to_string(loss.shape()) : std::string("undefined")));
  }
  GradMap grads;
  if (!loss.requires_grad()) return grads;

  const auto order = topological_order(loss);
  std::unordered_set<const TensorImpl*> relevant;
  for (const auto& t : order) {
    bool hit = targets.contains(t.impl()) || (all_leaves && t.is_leaf());
    if (!hit && t.grad_fn()) {
      for (const auto& in : t.grad_fn()->inputs()) {
        if (in.defined() && relevant.contains(in.impl())) {
          hit = true;
          break;
        }
      }
    }
    if (hit) relevant.insert(t.impl());
  }

  GradModeGuard mode(create_graph);
  grads.emplace(loss.impl(), Tensor::scalar(1.0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Tensor& out = *it;
    const auto& fn = out.grad_fn();
    if (!fn || !relevant.contains(out.impl())) continue;
    auto git = grads.find(out.impl());
    if (git == grads.end()) continue;
    if (create_graph && !fn->has_second_order()) {
      throw ContractViolation(std::string("no second-order rule for op '") + fn->name() + "'");
    }
    const auto& inputs = fn->inputs();
    Needs needs(inputs.size());
    bool any = false;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      needs[i] = inputs[i].defined() && inputs[i].requires_grad() && relevant.contains(inputs[i].impl());
      any = any || needs[i];
    }
    if (!any) continue;
    const Tensor g = git->second;
    // Intermediate gradients are no longer needed once consumed.
    if (!targets.contains(out.impl())) grads.erase(git);
    const auto input_grads = fn->backward(g, out, needs);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!needs[i] || !input_grads[i].defined()) continue;
      accumulate(grads, inputs[i].impl(), input_grads[i]);
    }
  }
  return grads;
}

}  // namespace

std::vector<Tensor> gradients(const Tensor& loss, std::span<const Tensor> wrt, bool create_graph) {
  std::unordered_set<const TensorImpl*> targets;
  for (const auto& t : wrt) targets.insert(t.impl());
  auto grads = reverse_sweep(loss, targets, false, create_graph);
  std::vector<Tensor> result;
  result.reserve(wrt.size());
  for (const auto& t : wrt) {
    auto it = grads.find(t.impl());
    result.push_back(it != grads.end() ? it->second : Tensor::zeros(t.shape()));
  }
  return result;
}

void backward(const Tensor& loss) {
  auto grads = reverse_sweep(loss, {}, true, false);
  for (const auto& t : topological_order(loss)) {
    if (!t.is_leaf() || !t.requires_grad()) continue;
    auto it = grads.find(t.impl());
    if (it != grads.end()) accumulate_leaf_grad(t, it->second);
  }
}

Tensor grad_as_node(const Tensor& loss, const Tensor& wrt) {
  const Tensor targets[] = {wrt};
  return gradients(loss, targets, true).front();
}

}  // namespace artic::ad
