#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "articgan/analysis/analysis.hpp"
#include "articgan/error.hpp"
#include "articgan/rng.hpp"

using namespace artic;

namespace {

EmaTrajectory wavy(std::size_t frames, double phase) {
  auto ema = EmaTrajectory::zeros(frames);
  for (std::size_t c = 0; c < kEmaChannels; ++c)
    for (std::size_t t = 0; t < frames; ++t)
      ema.channels[c][t] = std::sin(2 * std::numbers::pi * (t + phase) / (40.0 + 3.0 * c)) + 0.01 * c;
  return ema;
}

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / a.size());
}

}  // namespace

TEST(Loess, ReproducesLinearAndConstant) {
  std::vector<double> line(50), flat(50, 2.5);
  for (std::size_t i = 0; i < 50; ++i) line[i] = 0.3 * i - 4.0;
  for (double span : {0.1, 0.2, 0.5, 1.0}) {
    const auto s = loess_smooth(line, span, 1);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(s[i], line[i], 1e-9);
    const auto f = loess_smooth(flat, span, 1);
    for (double v : f) EXPECT_NEAR(v, 2.5, 1e-12);
  }
}

TEST(Loess, DegreeTwoReproducesQuadratic) {
  std::vector<double> q(40);
  for (std::size_t i = 0; i < 40; ++i) q[i] = 0.05 * i * i - i + 3;
  const auto s = loess_smooth(q, 0.25, 2);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_NEAR(s[i], q[i], 1e-8);
}

TEST(Loess, ReducesNoiseOnSine) {
  Rng rng(0);
  std::vector<double> clean(200), noisy(200);
  for (std::size_t i = 0; i < 200; ++i) {
    clean[i] = std::sin(2 * std::numbers::pi * i / 200.0);
    noisy[i] = clean[i] + 0.1 * rng.normal();
  }
  EXPECT_LT(rmse(loess_smooth(noisy, 0.2, 1), clean), rmse(noisy, clean));
}

TEST(Loess, RejectsTooFewNeighbours) {
  EXPECT_THROW(loess_smooth({1, 2, 3}, 0.5, 1), ContractViolation);
  EXPECT_THROW(loess_smooth({1, 2, 3, 4}, 0.0, 1), ContractViolation);
  EXPECT_THROW(loess_smooth({1, 2, 3, 4}, 1.0, 3), ContractViolation);
}

TEST(Dtw, IdenticalSeriesAlignDiagonally) {
  const std::vector<double> a = {0.5, 1, -2, 3};
  const auto r = dtw_align(a, a);
  EXPECT_EQ(r.total_cost, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(r.path[i], std::make_pair(i, i));
}

TEST(Dtw, SmallExampleAndSymmetry) {
  const auto r = dtw_align({0, 1, 2}, {0, 2});
  EXPECT_EQ(r.total_cost, 1.0);
  EXPECT_EQ(r.path.front(), std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(r.path.back(), std::make_pair(std::size_t{2}, std::size_t{1}));
  EXPECT_EQ(r.warped_a.size(), r.path.size());
  EXPECT_EQ(dtw_align({0, 2}, {0, 1, 2}).total_cost, 1.0);
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(1 + t % 7), b(1 + t % 5);
    for (auto& v : a) v = rng.uniform(-1, 1);
    for (auto& v : b) v = rng.uniform(-1, 1);
    EXPECT_NEAR(dtw_align(a, b).total_cost, dtw_align(b, a).total_cost, 1e-12);
  }
}

TEST(Dtw, TieBreakPrefersDiagonal) {
  // All costs zero: every path is optimal, the diagonal-first backtrace wins.
  const auto r = dtw_align({1, 1, 1}, {1, 1});
  const std::vector<std::pair<std::size_t, std::size_t>> expect = {{0, 0}, {1, 0}, {2, 1}};
  EXPECT_EQ(r.path, expect);
}

TEST(Dtw, RejectsEmpty) { EXPECT_THROW(dtw_align({}, {1.0}), ContractViolation); }

TEST(Pearson, ClosedFormCases) {
  const std::vector<double> a = {1, 2, 3, 5};
  std::vector<double> affine, negated;
  for (double v : a) {
    affine.push_back(2 * v + 1);
    negated.push_back(-v);
  }
  EXPECT_NEAR(*pearson_r(a, affine), 1.0, 1e-15);
  EXPECT_NEAR(*pearson_r(a, negated), -1.0, 1e-15);
  EXPECT_NEAR(*pearson_r({1, 2, 3}, {1, 3, 2}), 0.5, 1e-15);
  EXPECT_FALSE(pearson_r({1, 1, 1}, {1, 2, 3}).has_value());
  EXPECT_THROW(pearson_r({1, 2}, {1, 2, 3}), ContractViolation);
  EXPECT_THROW(pearson_r({1}, {1}), ContractViolation);
}

TEST(Pipeline, IdenticalInputsCorrelatePerfectly) {
  const auto x = wavy(120, 0);
  const auto report = dtw_corr_pipeline(x, x);
  ASSERT_EQ(report.size(), 12u);
  for (const auto& row : report) {
    ASSERT_TRUE(row.r.has_value());
    EXPECT_NEAR(*row.r, 1.0, 1e-12);
    EXPECT_EQ(row.dtw_cost, 0.0);
  }
  EXPECT_EQ(report[0].place, "lower_incisor");
  EXPECT_EQ(report[11].place, "tongue_dorsum");
  EXPECT_EQ(report[11].axis, 'y');
}

TEST(Pipeline, AbsorbsTimeShift) {
  // Motion between rest segments, delayed by 10 frames with edge padding.
  auto x = EmaTrajectory::zeros(256);
  for (std::size_t c = 0; c < kEmaChannels; ++c)
    for (std::size_t t = 0; t < 256; ++t) {
      const double env = 0.25 * (1 + std::tanh((t - 50.0) / 8)) * (1 - std::tanh((t - 200.0) / 8));
      x.channels[c][t] = env * std::sin(2 * std::numbers::pi * t / (50.0 + 7.0 * c));
    }
  auto y = x;
  for (auto& ch : y.channels) {
    for (std::size_t t = 255; t >= 10; --t) ch[t] = ch[t - 10];
    for (std::size_t t = 0; t < 10; ++t) ch[t] = ch[10];
  }
  for (const auto& row : dtw_corr_pipeline(x, y)) {
    ASSERT_TRUE(row.r.has_value());
    EXPECT_GE(*row.r, 0.99) << row.place << row.axis;
  }
}

TEST(Pipeline, ReportCsv) {
  ChannelCorrelationReport report = {{"upper_lip", 'x', 0.25, 1.5}, {"upper_lip", 'y', std::nullopt, 0.0}};
  EXPECT_EQ(format_correlation_report(report), "place,axis,r,dtw_cost\nupper_lip,x,0.25,1.5\nupper_lip,y,NA,0\n");
}

TEST(Pipeline, ZNormalizeOption) {
  const auto x = wavy(80, 0);
  auto scaled = x;
  for (auto& ch : scaled.channels)
    for (auto& v : ch) v = 3 * v + 1;
  CorrelationOptions opts;
  opts.z_normalize = true;
  for (const auto& row : dtw_corr_pipeline(x, scaled, opts)) EXPECT_NEAR(row.dtw_cost, 0.0, 1e-9);
}

// Exact hypergeometric p by integer enumeration.
TEST(OddsRatio, ExamplesAndEdgeCases) {
  auto r = odds_ratio_test(10, 10, 10, 10);
  EXPECT_DOUBLE_EQ(*r.odds_ratio, 1.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  r = odds_ratio_test(3, 7, 2, 8);
  EXPECT_NEAR(*r.odds_ratio, 24.0 / 14.0, 1e-15);
  // Margins 10/10/5/15: C(10,x)C(10,5-x) = 252,2100,5400,5400,2100,252 over 15504.
  // Observed x=3 (5400); tables with count <= 5400 are all of them.
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_NEAR(odds_ratio_test(1, 1, 1, 1).p_value, 1.0, 1e-12);
  // x=0 has 252: p = (252 + 252) / 15504.
  EXPECT_NEAR(odds_ratio_test(0, 10, 5, 5).p_value, 504.0 / 15504.0, 1e-12);
  EXPECT_TRUE(std::isinf(*odds_ratio_test(2, 0, 3, 4).odds_ratio));
  EXPECT_FALSE(odds_ratio_test(0, 0, 3, 4).odds_ratio.has_value());
  EXPECT_DOUBLE_EQ(*odds_ratio_test(0, 2, 3, 4).odds_ratio, 0.0);
  EXPECT_THROW(odds_ratio_test(-1, 2, 3, 4), ContractViolation);
}

TEST(TrajectoryExport, ScalingAndMissingReal) {
  const auto gen = wavy(60, 0);
  const auto real = wavy(60, 5);
  const auto without = trajectory_export(gen, nullptr);
  ASSERT_EQ(without.size(), 6u);
  EXPECT_TRUE(without[0].real_x.empty());
  const auto csv = format_trajectory_table(without[0]);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sample,gen_x,gen_y,real_x,real_y");
  const auto second = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
  EXPECT_EQ(second.substr(0, 2), "0,");
  EXPECT_EQ(second.substr(second.size() - 2), ",,");
  const auto unit = trajectory_export(gen, &real, 1.0);
  EXPECT_EQ(unit[2].real_y, real.channels[5]);
  const auto tripled = trajectory_export(gen, &real);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_DOUBLE_EQ(tripled[1].real_x[i], 3.0 * real.channels[2][i]);
  EXPECT_EQ(tripled[0].gen_x, loess_smooth(gen.channels[0], 0.2, 1));
}
