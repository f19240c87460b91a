#include "articgan/analysis/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "articgan/error.hpp"

namespace artic {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> z_score(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(x.size()));
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sd > 0.0 ? (x[i] - mean) / sd : x[i] - mean;
  return out;
}

// log C(n, k)
double log_choose(long long n, long long k) {
  return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

std::vector<double> loess_smooth(const std::vector<double>& series, double span, int degree) {
  if (degree != 1 && degree != 2) throw ContractViolation("loess: degree must be 1 or 2, got " + std::to_string(degree));
  if (!(span > 0.0 && span <= 1.0)) throw ContractViolation("loess: span must be in (0, 1], got " + fmt(span));
  const auto n = series.size();
  const auto q = std::min(n, static_cast<std::size_t>(std::floor(span * static_cast<double>(n) + 1e-9)));
  if (q < static_cast<std::size_t>(degree) + 1) {
    throw ContractViolation("loess: span * n = " + std::to_string(q) + " neighbours, need at least " +
                            std::to_string(degree + 1));
  }
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  std::vector<double> out(n);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(q), cols);
  Eigen::VectorXd target(static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < n; ++i) {
    const auto half = static_cast<std::ptrdiff_t>((q - 1) / 2);
    const auto lo = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - half, 0, static_cast<std::ptrdiff_t>(n - q)));
    const double reach = static_cast<double>(std::max(i - lo, lo + q - 1 - i));
    // Slightly wider than the farthest neighbour so every neighbour keeps some weight.
    const double h = reach * 1.001;
    for (std::size_t r = 0; r < q; ++r) {
      const double dx = static_cast<double>(lo + r) - static_cast<double>(i);
      const double u = std::abs(dx) / h;
      const double t = 1.0 - u * u * u;
      const double w = std::sqrt(t * t * t);
      const auto row = static_cast<Eigen::Index>(r);
      double p = 1.0;
      for (Eigen::Index c = 0; c < cols; ++c, p *= dx) design(row, c) = w * p;
      target(row) = w * series[lo + r];
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
    out[i] = beta(0);
  }
  return out;
}

AlignedPair dtw_align(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw ContractViolation("dtw: both series must be nonempty");
  const auto n = a.size();
  const auto m = b.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> acc(n * m, inf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double cost = std::abs(a[i] - b[j]);
      if (i == 0 && j == 0) {
        at(i, j) = cost;
        continue;
      }
      double best = inf;
      if (i > 0 && j > 0) best = at(i - 1, j - 1);
      if (i > 0) best = std::min(best, at(i - 1, j));
      if (j > 0) best = std::min(best, at(i, j - 1));
      at(i, j) = cost + best;
    }
  }
  AlignedPair out;
  out.total_cost = at(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  out.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    out.path.emplace_back(i, j);
  }
  std::reverse(out.path.begin(), out.path.end());
  out.warped_a.reserve(out.path.size());
  out.warped_b.reserve(out.path.size());
  for (const auto& [pi, pj] : out.path) {
    out.warped_a.push_back(a[pi]);
    out.warped_b.push_back(b[pj]);
  }
  return out;
}

std::optional<double> pearson_r(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ContractViolation("pearson: series lengths differ");
  if (a.size() < 2) throw ContractViolation("pearson: need at least two samples");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

ChannelCorrelationReport dtw_corr_pipeline(const EmaTrajectory& gen, const EmaTrajectory& real,
                                           const CorrelationOptions& options) {
  ChannelCorrelationReport report;
  for (std::size_t ch = 0; ch < kArticulatorChannels; ++ch) {
    auto g = loess_smooth(gen.channels[ch], options.span, options.degree);
    auto r = loess_smooth(real.channels[ch], options.span, options.degree);
    if (options.z_normalize) {
      g = z_score(g);
      r = z_score(r);
    }
    const auto aligned = dtw_align(g, r);
    ChannelCorrelation row;
    row.place = std::string(kPlaceNames[ch / 2]);
    row.axis = ch % 2 == 0 ? 'x' : 'y';
    row.r = aligned.path.size() >= 2 ? pearson_r(aligned.warped_a, aligned.warped_b) : std::nullopt;
    row.dtw_cost = aligned.total_cost;
    report.push_back(std::move(row));
  }
  return report;
}

std::string format_correlation_report(const ChannelCorrelationReport& report) {
  std::string out = std::string(kCorrelationHeader) + "\n";
  for (const auto& row : report) {
    out += row.place + "," + row.axis + "," + (row.r ? fmt(*row.r) : "NA") + "," + fmt(row.dtw_cost) + "\n";
  }
  return out;
}

OddsRatioResult odds_ratio_test(long long a, long long b, long long c, long long d) {
  if (a < 0 || b < 0 || c < 0 || d < 0) throw ContractViolation("odds ratio: counts must be non-negative");
  OddsRatioResult result;
  const double ad = static_cast<double>(a) * static_cast<double>(d);
  const double bc = static_cast<double>(b) * static_cast<double>(c);
  if (bc > 0.0) {
    result.odds_ratio = ad / bc;
  } else if (ad > 0.0) {
    result.odds_ratio = std::numeric_limits<double>::infinity();
  }

  const long long row1 = a + b;
  const long long row2 = c + d;
  const long long col1 = a + c;
  const long long total = row1 + row2;
  const long long lo = std::max(0LL, col1 - row2);
  const long long hi = std::min(row1, col1);
  const double log_denominator = log_choose(total, col1);
  auto log_prob = [&](long long x) { return log_choose(row1, x) + log_choose(row2, col1 - x) - log_denominator; };
  const double observed = log_prob(a);
  double p = 0.0;
  for (long long x = lo; x <= hi; ++x) {
    const double lp = log_prob(x);
    // Relative slack of 1e-7 keeps tables tied with the observed one.
    if (lp <= observed + 1e-7) p += std::exp(lp);
  }
  result.p_value = std::min(1.0, p);
  return result;
}

std::vector<TrajectoryTable> trajectory_export(const EmaTrajectory& gen, const EmaTrajectory* real, double real_scale,
                                               double span) {
  std::vector<TrajectoryTable> tables;
  for (std::size_t place = 0; place < kPlaceNames.size(); ++place) {
    TrajectoryTable t;
    t.place = std::string(kPlaceNames[place]);
    t.gen_x = loess_smooth(gen.channels[2 * place], span, 1);
    t.gen_y = loess_smooth(gen.channels[2 * place + 1], span, 1);
    if (real) {
      for (double v : real->channels[2 * place]) t.real_x.push_back(v * real_scale);
      for (double v : real->channels[2 * place + 1]) t.real_y.push_back(v * real_scale);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string format_trajectory_table(const TrajectoryTable& table) {
  auto cell = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? fmt(v[i]) : std::string(); };
  const auto rows = std::max({table.gen_x.size(), table.gen_y.size(), table.real_x.size(), table.real_y.size()});
  std::string out = std::string(kTrajectoryHeader) + "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i) + "," + cell(table.gen_x, i) + "," + cell(table.gen_y, i) + "," + cell(table.real_x, i) +
           "," + cell(table.real_y, i) + "\n";
  }
  return out;
}

}  // namespace artic
