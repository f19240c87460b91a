#include "articgan/io/ema_csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "articgan/error.hpp"

namespace artic {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

EmaTrajectory ema_parse(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("ema: empty file, header expected");
  const auto header = split(line);
  for (std::size_t i = 0; i < kEmaChannels; ++i) {
    if (i >= header.size()) throw FormatError("ema: missing column '" + std::string(kEmaChannelNames[i]) + "'");
    if (header[i] != kEmaChannelNames[i]) {
      throw FormatError("ema: column " + std::to_string(i + 1) + " must be '" + std::string(kEmaChannelNames[i]) +
                        "', found '" + header[i] + "'");
    }
  }
  if (header.size() > kEmaChannels) throw FormatError("ema: unexpected extra column '" + header[kEmaChannels] + "'");

  EmaTrajectory ema;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != kEmaChannels) {
      throw FormatError("ema: row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                        " fields, expected 13");
    }
    for (std::size_t c = 0; c < kEmaChannels; ++c) {
      double value = 0.0;
      const auto& f = fields[c];
      const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || end != f.data() + f.size()) {
        throw FormatError("ema: row " + std::to_string(row) + " column '" + std::string(kEmaChannelNames[c]) +
                          "': not a number '" + f + "'");
      }
      ema.channels[c].push_back(value);
    }
  }
  return ema;
}

void ema_format(std::ostream& out, const EmaTrajectory& ema) {
  for (std::size_t c = 0; c < kEmaChannels; ++c) out << (c ? "," : "") << kEmaChannelNames[c];
  out << '\n';
  char buf[32];
  for (std::size_t t = 0; t < ema.frames(); ++t) {
    for (std::size_t c = 0; c < kEmaChannels; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", ema.channels[c][t]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

EmaTrajectory ema_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("ema: cannot open " + path.string());
  try {
    return ema_parse(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void ema_write(const std::filesystem::path& path, const EmaTrajectory& ema) {
  std::ofstream out(path);
  if (!out) throw FormatError("ema: cannot write " + path.string());
  ema_format(out, ema);
}

}  // namespace artic
