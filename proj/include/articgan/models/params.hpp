#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "articgan/ad/tensor.hpp"

namespace artic {

struct Parameter {
  std::string name;
  ad::Tensor value;
  bool trainable = true;
};

/// Ordered, named parameter tensors. A trainable entry is a leaf that
/// requires grad; frozen entries never do.
class ModelParams {
 public:
  void add(std::string name, ad::Tensor value, bool trainable);

  bool contains(std::string_view name) const;
  const ad::Tensor& at(std::string_view name) const;
  ad::Tensor& at(std::string_view name);

  std::span<const Parameter> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<ad::Tensor> trainable_tensors() const;
  std::size_t value_count() const;

  /// Marks every entry frozen (or trainable) and updates requires_grad.
  void set_trainable(bool trainable);

  /// FNV-1a over names, shapes, flags and values.
  std::uint64_t hash() const;

  /// Independent deep copy.
  ModelParams clone() const;

 private:
  std::vector<Parameter> entries_;
};

}  // namespace artic
