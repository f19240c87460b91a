#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace artic {

// 64-bit FNV-1a, used for parameter content hashes.
class Fnv1a {
 public:
  void update(const void* bytes, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(std::string_view text) { update(text.data(), text.size()); }
  void update(std::span<const double> values) { update(values.data(), values.size_bytes()); }
  template <class T>
  void update_value(const T& value) { update(&value, sizeof(T)); }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace artic
