#include "articgan/io/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "articgan/error.hpp"

namespace artic {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform wav_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto where = path.string() + ": ";
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("wav: " + where + "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto size = read_u32(bytes.data() + pos + 4);
    const unsigned char* body = bytes.data() + pos + 8;
    if (pos + 8 + size > bytes.size()) throw FormatError("wav: " + where + "truncated chunk");
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("wav: " + where + "short fmt chunk");
      const auto format = read_u16(body);
      const auto channels = read_u16(body + 2);
      const auto rate = read_u32(body + 4);
      const auto bits = read_u16(body + 14);
      if (format != 1) throw FormatError("wav: " + where + "encoding must be PCM (format 1), got " + std::to_string(format));
      if (channels != 1) throw FormatError("wav: " + where + "expected mono, got " + std::to_string(channels) + " channels");
      if (rate != 16000) throw FormatError("wav: " + where + "sample rate must be 16000 Hz, got " + std::to_string(rate));
      if (bits != 16) throw FormatError("wav: " + where + "expected 16-bit samples, got " + std::to_string(bits));
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("wav: " + where + "data chunk before fmt chunk");
      if (size % 2 != 0) throw FormatError("wav: " + where + "odd data chunk size");
      Waveform wave;
      wave.samples.resize(size / 2);
      for (std::size_t i = 0; i < wave.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(read_u16(body + 2 * i));
        wave.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return wave;
    }
    pos += 8 + size + (size & 1u);
  }
  throw FormatError("wav: " + where + (have_fmt ? "missing data chunk" : "missing fmt chunk"));
}

void wav_write(const std::filesystem::path& path, const Waveform& wave) {
  if (wave.sample_rate != kAudioRate) throw ContractViolation("wav: only 16000 Hz waveforms can be written");
  std::string out;
  const auto data_bytes = static_cast<std::uint32_t>(2 * wave.samples.size());
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, 16000);
  put_u32(out, 32000);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double x : wave.samples) {
    if (!std::isfinite(x)) throw ContractViolation("wav: non-finite sample");
    const double q = std::clamp(std::nearbyint(x * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FormatError("wav: cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw FormatError("wav: write failed for " + path.string());
}

}  // namespace artic
