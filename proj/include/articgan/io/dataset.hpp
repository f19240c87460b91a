#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "articgan/ad/tensor.hpp"

namespace artic {

/// Fixed-length training waveforms with the files they came from.
struct Dataset {
  std::vector<std::string> names;
  std::vector<std::vector<double>> items;

  std::size_t size() const { return items.size(); }
  /// Throws unless every item has `length` samples in [-1, 1].
  void validate(std::size_t length) const;
  /// Stacks the selected items into [n x 1 x length].
  ad::Tensor batch(const std::vector<std::size_t>& indices) const;
};

/// Symmetric zero padding or centre crop to exactly `target` samples.
/// Odd remainders put the extra sample on the right.
std::vector<double> fit_length(const std::vector<double>& samples, std::size_t target);

/// Loads every *.wav in `dir`, ordered by file name, fitted to `target_len`.
Dataset dataset_load(const std::filesystem::path& dir, std::size_t target_len = 20480);

}  // namespace artic
