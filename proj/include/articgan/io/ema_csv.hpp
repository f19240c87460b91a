#pragma once

#include <filesystem>
#include <iosfwd>

#include "articgan/ema.hpp"

namespace artic {

/// EMA CSV: header li_x,...,td_y,voicing in that exact order, one row per
/// 200 Hz frame, values printed with 17 significant digits.
EmaTrajectory ema_parse(std::istream& in);
void ema_format(std::ostream& out, const EmaTrajectory& ema);

EmaTrajectory ema_read(const std::filesystem::path& path);
void ema_write(const std::filesystem::path& path, const EmaTrajectory& ema);

}  // namespace artic
