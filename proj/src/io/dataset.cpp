#include "articgan/io/dataset.hpp"

#include <algorithm>

#include "articgan/error.hpp"
#include "articgan/io/wav.hpp"

namespace artic {

void Dataset::validate(std::size_t length) const {
  if (items.empty()) throw ContractViolation("dataset is empty");
  if (names.size() != items.size()) throw ContractViolation("dataset names and items differ in count");
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].size() != length) {
      throw FormatError("dataset item '" + names[i] + "' has " + std::to_string(items[i].size()) +
                        " samples, expected " + std::to_string(length));
    }
    for (double v : items[i]) {
      if (!(v >= -1.0 && v <= 1.0)) throw FormatError("dataset item '" + names[i] + "' has samples outside [-1, 1]");
    }
  }
}

ad::Tensor Dataset::batch(const std::vector<std::size_t>& indices) const {
  if (indices.empty()) throw ContractViolation("dataset batch: no indices");
  const auto length = items.at(indices.front()).size();
  std::vector<double> values;
  values.reserve(indices.size() * length);
  for (auto i : indices) {
    const auto& item = items.at(i);
    if (item.size() != length) throw ContractViolation("dataset batch: items differ in length");
    values.insert(values.end(), item.begin(), item.end());
  }
  return ad::Tensor({indices.size(), 1, length}, std::move(values));
}

std::vector<double> fit_length(const std::vector<double>& samples, std::size_t target) {
  if (samples.size() == target) return samples;
  std::vector<double> out(target, 0.0);
  if (samples.size() < target) {
    const auto left = (target - samples.size()) / 2;
    std::copy(samples.begin(), samples.end(), out.begin() + static_cast<std::ptrdiff_t>(left));
  } else {
    const auto offset = (samples.size() - target) / 2;
    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(offset), target, out.begin());
  }
  return out;
}

Dataset dataset_load(const std::filesystem::path& dir, std::size_t target_len) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw FormatError("dataset: '" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  }
  if (files.empty()) throw FormatError("dataset: no .wav files in '" + dir.string() + "'");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  Dataset data;
  for (const auto& f : files) {
    data.names.push_back(f.filename().string());
    data.items.push_back(fit_length(wav_read(f).samples, target_len));
  }
  data.validate(target_len);
  return data;
}

}  // namespace artic
