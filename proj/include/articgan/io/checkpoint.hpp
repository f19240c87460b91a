#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "articgan/ad/tensor.hpp"
#include "articgan/models/params.hpp"
#include "articgan/train/adam.hpp"

namespace artic {

inline constexpr char kCheckpointMagic[8] = {'A', 'R', 'T', 'G', 'A', 'N', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  ad::Shape shape;
  std::vector<double> values;
  bool trainable = true;
  bool operator==(const NamedTensor&) const = default;
};

struct OptimizerSnapshot {
  std::string name;
  AdamState state;
  bool operator==(const OptimizerSnapshot&) const = default;
};

/// Little-endian binary layout:
///   magic "ARTGANCK" | u32 version | u64 step
///   u32 n_config, then n_config x (str key, str value)
///   u32 n_tensors, then per tensor: str name, u8 trainable, u32 rank,
///       u64 extents[rank], f64 values[prod(extents)]
///   u32 n_optimizers, then per optimizer: str name, u64 adam_step,
///       u32 n_buffers, per buffer: u64 length, f64 m[length], f64 v[length]
///   u32 CRC-32 of every preceding byte
/// where str is u32 byte length followed by the bytes.
struct Checkpoint {
  std::uint64_t step = 0;
  std::map<std::string, std::string> config;
  std::vector<NamedTensor> tensors;
  std::vector<OptimizerSnapshot> optimizers;

  /// Appends every entry of `params` with `prefix` prepended to its name.
  void add_params(std::string_view prefix, const ModelParams& params);
  /// Entries whose name starts with `prefix`, prefix stripped.
  ModelParams extract_params(std::string_view prefix) const;
  const OptimizerSnapshot* optimizer(std::string_view name) const;
  bool operator==(const Checkpoint&) const = default;
};

std::string checkpoint_serialize(const Checkpoint& ckpt);
Checkpoint checkpoint_parse(std::string_view bytes);

void checkpoint_save(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint checkpoint_load(const std::filesystem::path& path);

}  // namespace artic
