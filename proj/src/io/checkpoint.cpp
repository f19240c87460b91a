#include "articgan/io/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "articgan/error.hpp"

namespace artic {

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  std::string& buffer() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw FormatError("checkpoint: truncated at byte " + std::to_string(pos_));
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::vector<double> f64s(std::uint64_t n) {
    if (n > (data_.size() - pos_) / 8) throw FormatError("checkpoint: array length exceeds file size");
    std::vector<double> out(n);
    for (auto& v : out) v = f64();
    return out;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

void Checkpoint::add_params(std::string_view prefix, const ModelParams& params) {
  for (const auto& p : params.entries()) {
    tensors.push_back({std::string(prefix) + p.name, p.value.shape(),
                       std::vector<double>(p.value.data().begin(), p.value.data().end()), p.trainable});
  }
}

ModelParams Checkpoint::extract_params(std::string_view prefix) const {
  ModelParams params;
  for (const auto& t : tensors) {
    if (t.name.starts_with(prefix)) {
      params.add(t.name.substr(prefix.size()), ad::Tensor(t.shape, t.values), t.trainable);
    }
  }
  return params;
}

const OptimizerSnapshot* Checkpoint::optimizer(std::string_view name) const {
  for (const auto& o : optimizers) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

std::string checkpoint_serialize(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u64(ckpt.step);
  w.u32(static_cast<std::uint32_t>(ckpt.config.size()));
  for (const auto& [key, value] : ckpt.config) {
    w.str(key);
    w.str(value);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    if (ad::numel(t.shape) != t.values.size()) {
      throw ContractViolation("checkpoint: tensor '" + t.name + "' values do not match its shape");
    }
    w.str(t.name);
    w.u8(t.trainable ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto extent : t.shape) w.u64(extent);
    for (double v : t.values) w.f64(v);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.optimizers.size()));
  for (const auto& o : ckpt.optimizers) {
    w.str(o.name);
    w.u64(o.state.step);
    w.u32(static_cast<std::uint32_t>(o.state.m.size()));
    for (std::size_t i = 0; i < o.state.m.size(); ++i) {
      w.u64(o.state.m[i].size());
      for (double v : o.state.m[i]) w.f64(v);
      for (double v : o.state.v[i]) w.f64(v);
    }
  }
  const auto crc = crc32_of(w.buffer());
  w.u32(crc);
  return std::move(w.buffer());
}

Checkpoint checkpoint_parse(std::string_view bytes) {
  if (bytes.size() < sizeof kCheckpointMagic + 8 ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw FormatError("checkpoint: bad magic, not a checkpoint file");
  }
  const auto body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (crc32_of(body) != tail.u32()) throw FormatError("checkpoint: checksum mismatch, file is corrupted");

  Reader r(body);
  r.skip(sizeof kCheckpointMagic);
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion));
  }
  Checkpoint ckpt;
  ckpt.step = r.u64();
  const auto n_config = r.u32();
  for (std::uint32_t i = 0; i < n_config; ++i) {
    auto key = r.str();
    ckpt.config[key] = r.str();
  }
  const auto n_tensors = r.u32();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    NamedTensor t;
    t.name = r.str();
    t.trainable = r.u8() != 0;
    const auto rank = r.u32();
    if (rank == 0 || rank > 8) throw FormatError("checkpoint: tensor '" + t.name + "' has invalid rank");
    for (std::uint32_t d = 0; d < rank; ++d) t.shape.push_back(r.u64());
    t.values = r.f64s(ad::numel(t.shape));
    ckpt.tensors.push_back(std::move(t));
  }
  const auto n_opt = r.u32();
  for (std::uint32_t i = 0; i < n_opt; ++i) {
    OptimizerSnapshot o;
    o.name = r.str();
    o.state.step = r.u64();
    const auto n_buffers = r.u32();
    for (std::uint32_t b = 0; b < n_buffers; ++b) {
      const auto len = r.u64();
      o.state.m.push_back(r.f64s(len));
      o.state.v.push_back(r.f64s(len));
    }
    ckpt.optimizers.push_back(std::move(o));
  }
  if (!r.done()) throw FormatError("checkpoint: trailing bytes after optimizer state");
  return ckpt;
}

void checkpoint_save(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = checkpoint_serialize(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("checkpoint: cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("checkpoint: write failed for " + path.string());
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("checkpoint: cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return checkpoint_parse(bytes);
}

}  // namespace artic
