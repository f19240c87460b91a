#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "articgan/ema.hpp"

namespace artic {

/// Local regression with tricube weights over the floor(span * n) nearest
/// samples, evaluated at every sample. degree is 1 or 2.
std::vector<double> loess_smooth(const std::vector<double>& series, double span = 0.2, int degree = 1);

struct AlignedPair {
  std::vector<std::pair<std::size_t, std::size_t>> path;
  std::vector<double> warped_a;
  std::vector<double> warped_b;
  double total_cost = 0.0;
};

/// Minimal |a_i - b_j| cost alignment with steps (1,0), (0,1), (1,1). On
/// backtrace ties the diagonal wins, then (1,0), then (0,1).
AlignedPair dtw_align(const std::vector<double>& a, const std::vector<double>& b);

/// Pearson's r, or nullopt when either series has zero variance.
std::optional<double> pearson_r(const std::vector<double>& a, const std::vector<double>& b);

struct ChannelCorrelation {
  std::string place;
  char axis = 'x';
  std::optional<double> r;
  double dtw_cost = 0.0;
};

struct CorrelationOptions {
  double span = 0.2;
  int degree = 1;
  /// Z-score each channel before alignment.
  bool z_normalize = false;
};

/// One row per articulator channel (12 rows, voicing excluded), in channel order.
using ChannelCorrelationReport = std::vector<ChannelCorrelation>;

/// Smooths both trajectories, aligns each articulator channel with DTW and
/// correlates the warped series.
ChannelCorrelationReport dtw_corr_pipeline(const EmaTrajectory& gen, const EmaTrajectory& real,
                                           const CorrelationOptions& options = {});

inline constexpr const char* kCorrelationHeader = "place,axis,r,dtw_cost";
/// CSV with kCorrelationHeader; undefined r is written as NA.
std::string format_correlation_report(const ChannelCorrelationReport& report);

struct OddsRatioResult {
  /// +inf when b*c == 0 < a*d; nullopt when both products are zero.
  std::optional<double> odds_ratio;
  /// Two-sided Fisher exact p.
  double p_value = 1.0;
};

/// Table [[a, b], [c, d]].
OddsRatioResult odds_ratio_test(long long a, long long b, long long c, long long d);

struct TrajectoryTable {
  std::string place;
  std::vector<double> gen_x;
  std::vector<double> gen_y;
  /// Empty when no real trajectory was given.
  std::vector<double> real_x;
  std::vector<double> real_y;
};

inline constexpr double kRealDisplayScale = 3.0;

/// Per articulator: smoothed generated x/y and the real x/y times real_scale.
std::vector<TrajectoryTable> trajectory_export(const EmaTrajectory& gen, const EmaTrajectory* real,
                                               double real_scale = kRealDisplayScale, double span = 0.2);

inline constexpr const char* kTrajectoryHeader = "sample,gen_x,gen_y,real_x,real_y";
std::string format_trajectory_table(const TrajectoryTable& table);

}  // namespace artic
