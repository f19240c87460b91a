#include "articgan/models/params.hpp"

#include <algorithm>

#include "articgan/error.hpp"
#include "articgan/hash.hpp"

namespace artic {

void ModelParams::add(std::string name, ad::Tensor value, bool trainable) {
  if (contains(name)) throw ContractViolation("duplicate parameter name '" + name + "'");
  if (!value.is_leaf()) throw ContractViolation("parameter '" + name + "' must be a leaf tensor");
  value.set_requires_grad(trainable);
  entries_.push_back({std::move(name), std::move(value), trainable});
}

bool ModelParams::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Parameter& p) { return p.name == name; });
}

const ad::Tensor& ModelParams::at(std::string_view name) const {
  for (const auto& p : entries_) {
    if (p.name == name) return p.value;
  }
  throw ContractViolation("missing parameter '" + std::string(name) + "'");
}

ad::Tensor& ModelParams::at(std::string_view name) {
  return const_cast<ad::Tensor&>(static_cast<const ModelParams&>(*this).at(name));
}

std::vector<ad::Tensor> ModelParams::trainable_tensors() const {
  std::vector<ad::Tensor> out;
  for (const auto& p : entries_) {
    if (p.trainable) out.push_back(p.value);
  }
  return out;
}

std::size_t ModelParams::value_count() const {
  std::size_t n = 0;
  for (const auto& p : entries_) n += p.value.numel();
  return n;
}

void ModelParams::set_trainable(bool trainable) {
  for (auto& p : entries_) {
    p.trainable = trainable;
    p.value.set_requires_grad(trainable);
  }
}

std::uint64_t ModelParams::hash() const {
  Fnv1a h;
  for (const auto& p : entries_) {
    h.update(p.name);
    h.update_value(static_cast<std::uint8_t>(p.trainable));
    for (auto extent : p.value.shape()) h.update_value(static_cast<std::uint64_t>(extent));
    h.update(p.value.data());
  }
  return h.digest();
}

ModelParams ModelParams::clone() const {
  ModelParams copy;
  for (const auto& p : entries_) copy.add(p.name, p.value.detach(), p.trainable);
  return copy;
}

}  // namespace artic
