#include <algorithm>
#include <gtest/gtest.h>
#include <random>
#include <sstream>

#include "lidarvt/metrics.hpp"
#include "oracles.hpp"

using namespace lidarvt;

namespace {

BinaryCounts counts_of(const std::vector<float>& pred, const std::vector<std::uint8_t>& gt,
                       double threshold = 0.5) {
  BinaryCounts c;
  EvalConfig cfg;
  cfg.threshold = threshold;
  accumulate(pred, gt, cfg, c);
  return c;
}

struct RandomPair {
  std::vector<float> pred;
  std::vector<std::uint8_t> gt;
};

RandomPair random_pair(std::size_t n, std::uint64_t seed, bool hard) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  const double density = u(gen);
  RandomPair p;
  for (std::size_t i = 0; i < n; ++i) {
    p.gt.push_back(u(gen) < density ? 1 : 0);
    p.pred.push_back(hard ? (u(gen) < 0.5f ? 1.0f : 0.0f) : u(gen));
  }
  return p;
}

EvalConfig tversky_cfg(double a, double b) {
  EvalConfig c;
  c.tversky_alpha = a;
  c.tversky_beta = b;
  return c;
}

}  // namespace

TEST(Confusion, FourByFourHandCount) {
  // Rows of a 4x4 tile: 3 TP, 1 FP, 2 FN, 10 TN.
  const std::vector<std::uint8_t> gt = {1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  const std::vector<float> pred = {0.9f, 0.6f, 0.5f, 0.7f, 0.1f, 0.49f, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  const BinaryCounts c = counts_of(pred, gt);
  EXPECT_EQ(c, (BinaryCounts{3, 1, 2, 10}));
  EXPECT_EQ(c.total(), 16u);
  EXPECT_DOUBLE_EQ(iou(c), 0.5);
  EXPECT_DOUBLE_EQ(precision(c), 0.75);
  EXPECT_DOUBLE_EQ(recall(c), 0.6);
}

TEST(Confusion, ThresholdIsInclusive) {
  const std::vector<float> pred(9, 0.5f);
  const std::vector<std::uint8_t> gt(9, 0);
  EXPECT_EQ(counts_of(pred, gt).fp, 9u);
  EXPECT_EQ(counts_of(pred, gt, 0.50001).tn, 9u);
}

TEST(Confusion, RejectsBadInput) {
  BinaryCounts c;
  EXPECT_THROW(accumulate(std::vector<float>{0.1f}, std::vector<std::uint8_t>{0, 1}, {}, c),
               std::invalid_argument);
  EXPECT_THROW(accumulate(std::vector<float>{1.5f}, std::vector<std::uint8_t>{0}, {}, c),
               std::invalid_argument);
  EXPECT_THROW(accumulate(std::vector<float>{-0.1f}, std::vector<std::uint8_t>{0}, {}, c),
               std::invalid_argument);
  EvalConfig bad;
  bad.threshold = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Scores, VacuousAndExtremeCases) {
  const BinaryCounts empty{0, 0, 0, 25};
  EXPECT_EQ(iou(empty), 1.0);
  EXPECT_EQ(precision(empty), 1.0);
  EXPECT_EQ(recall(empty), 1.0);

  const std::vector<std::uint8_t> gt = {1, 1, 0, 0};
  EXPECT_EQ(iou(counts_of({1, 1, 0, 0}, gt)), 1.0);
  EXPECT_EQ(iou(counts_of({0, 0, 1, 1}, gt)), 0.0);
  const BinaryCounts superset = counts_of({1, 1, 1, 0}, gt);
  EXPECT_EQ(recall(superset), 1.0);
  EXPECT_LT(precision(superset), 1.0);
  // Never predicted but present: precision is vacuous, recall is 0.
  const BinaryCounts missed = counts_of({0, 0, 0, 0}, gt);
  EXPECT_EQ(precision(missed), 1.0);
  EXPECT_EQ(recall(missed), 0.0);
  EXPECT_EQ(iou(missed), 0.0);
}

TEST(Scores, IouNeverExceedsPrecisionOrRecall) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = random_pair(64, seed, false);
    const BinaryCounts c = counts_of(p.pred, p.gt);
    if (c.tp == 0) continue;
    EXPECT_LE(iou(c), std::min(precision(c), recall(c)));
  }
}

TEST(Scores, RandomPairsMatchPixelLoop) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto p = random_pair(1 + seed % 97, seed, seed % 2 == 0);
    const double thr = 0.25 + 0.5 * static_cast<double>(seed % 3) / 2.0;
    const BinaryCounts c = counts_of(p.pred, p.gt, thr);
    const oracle::Counts o = oracle::confusion(p.pred, p.gt, thr);
    ASSERT_EQ(c.tp, o.tp);
    ASSERT_EQ(c.fp, o.fp);
    ASSERT_EQ(c.fn, o.fn);
    ASSERT_EQ(c.tn, o.tn);
  }
}

TEST(Accumulation, MergeIsOrderIndependent) {
  std::vector<ConfusionCounts> parts;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    ConfusionCounts cc;
    for (int cls = 1; cls <= 3; ++cls) {
      const auto p = random_pair(50, seed * 10 + cls, false);
      accumulate(p.pred, p.gt, {}, cc[cls]);
    }
    parts.push_back(cc);
  }
  ConfusionCounts forward, backward, tree;
  for (const auto& p : parts) forward.merge(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward.merge(*it);
  ConfusionCounts left, right;
  for (std::size_t i = 0; i < 6; ++i) left.merge(parts[i]);
  for (std::size_t i = 6; i < 12; ++i) right.merge(parts[i]);
  tree.merge(right);
  tree.merge(left);
  EXPECT_EQ(forward, backward);
  EXPECT_EQ(forward, tree);
  EXPECT_EQ(iou(forward, 2), iou(tree, 2));
  EXPECT_THROW(forward.at(9), std::out_of_range);
}

TEST(Accumulation, MicroNotMacro) {
  // Tile A: perfect on 1 pixel. Tile B: 1 TP and 3 FP. Micro IoU is 2/5, not
  // the per-tile mean (1 + 1/4) / 2.
  ConfusionCounts cc;
  accumulate(std::vector<float>{1}, std::vector<std::uint8_t>{1}, {}, cc[1]);
  accumulate(std::vector<float>{1, 1, 1, 1}, std::vector<std::uint8_t>{1, 0, 0, 0}, {}, cc[1]);
  EXPECT_DOUBLE_EQ(iou(cc, 1), 0.4);
}

TEST(Tversky, HandEvaluatedTwoByTwo) {
  const std::vector<float> p = {1.0f, 0.5f, 0.0f, 0.0f};
  const std::vector<std::uint8_t> g = {1, 1, 0, 0};
  const double loss = tversky_loss(p, g, tversky_cfg(0.7, 0.3));
  EXPECT_NEAR(loss, 1.0 - (1.5 + 1e-7) / (1.85 + 1e-7), 1e-12);
  EXPECT_NEAR(loss, 0.18919, 1e-5);
}

TEST(Tversky, PerfectPredictionIsZero) {
  const std::vector<std::uint8_t> g = {1, 0, 1, 1, 0};
  const std::vector<float> p = {1, 0, 1, 1, 0};
  EXPECT_NEAR(tversky_loss(p, g, {}), 0.0, 1e-12);
  // Empty target, empty prediction: 1 - eps/eps.
  EXPECT_NEAR(tversky_loss(std::vector<float>(4, 0.0f), std::vector<std::uint8_t>(4, 0), {}), 0.0, 1e-12);
}

TEST(Tversky, HalfHalfEqualsOneMinusDice) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto p = random_pair(1 + seed % 300, 1000 + seed, seed % 5 == 0);
    const double t = tversky_loss(p.pred, p.gt, tversky_cfg(0.5, 0.5));
    const double d = dice_coefficient(p.pred, p.gt);
    ASSERT_NEAR(t, 1.0 - d, 1e-9);
    ASSERT_NEAR(d, oracle::dice(p.pred, p.gt), 1e-9);
  }
}

TEST(Tversky, MatchesSoftOracle) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto p = random_pair(200, 2000 + seed, false);
    for (auto [a, b] : {std::pair{0.7, 0.3}, std::pair{0.3, 0.7}, std::pair{1.0, 0.0}}) {
      const double loss = tversky_loss(p.pred, p.gt, tversky_cfg(a, b));
      ASSERT_NEAR(loss, oracle::tversky(p.pred, p.gt, a, b), 1e-9);
      ASSERT_GE(loss, 0.0);
      ASSERT_LT(loss, 1.0);
    }
  }
}

TEST(Tversky, MonotoneInAlphaAndBeta) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = random_pair(100, 3000 + seed, false);
    double prev = -1.0;
    for (double a = 0.0; a <= 1.0; a += 0.1) {
      const double loss = tversky_loss(p.pred, p.gt, tversky_cfg(a, 0.3));
      ASSERT_GE(loss, prev - 1e-15);
      prev = loss;
    }
    prev = -1.0;
    for (double b = 0.0; b <= 1.0; b += 0.1) {
      const double loss = tversky_loss(p.pred, p.gt, tversky_cfg(0.7, b));
      ASSERT_GE(loss, prev - 1e-15);
      prev = loss;
    }
  }
}

TEST(Tversky, ShapeMismatchThrows) {
  EXPECT_THROW(tversky_loss(std::vector<float>{0.1f, 0.2f}, std::vector<std::uint8_t>{1}, {}),
               std::invalid_argument);
  EXPECT_THROW(dice_coefficient(std::vector<float>{0.1f}, std::vector<std::uint8_t>{}),
               std::invalid_argument);
}

TEST(MetricCsv, RoundTripsExactly) {
  std::vector<MetricRow> rows;
  rows.push_back(make_metric_row("run-a", 3, "VAT", 2, 1, {3, 1, 2, 10}));
  rows.push_back(make_metric_row("run-a", 3, "VAT", 2, 2, {0, 0, 0, 16}));
  rows.push_back(make_metric_row("run-a", 3, "VAT", 2, 3, {7, 2, 0, 1}));
  EXPECT_DOUBLE_EQ(rows[0].iou, 0.5);
  EXPECT_EQ(rows[1].precision, 1.0);
  std::stringstream s;
  write_metric_csv(s, rows);
  const std::string text = s.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kMetricCsvHeader);
  EXPECT_NE(text.find("run-a,3,VAT,2,1,3,1,2,10,0.5,0.75,0.6\n"), std::string::npos);
  std::stringstream in(text);
  EXPECT_EQ(read_metric_csv(in), rows);
}

TEST(MetricCsv, FormatRealIsShortestRoundTrip) {
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(7.0 / 9.0), "0.7777777777777778");
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}

TEST(MetricCsv, RejectsMalformedInput) {
  std::stringstream bad_header("run,model\n");
  EXPECT_THROW(read_metric_csv(bad_header), std::invalid_argument);
  std::stringstream short_row(std::string(kMetricCsvHeader) + "\nrun,1,VAT,0,1,3\n");
  EXPECT_THROW(read_metric_csv(short_row), std::invalid_argument);
  std::stringstream bad_number(std::string(kMetricCsvHeader) + "\nrun,x,VAT,0,1,3,1,2,10,0.5,0.75,0.6\n");
  EXPECT_THROW(read_metric_csv(bad_number), std::invalid_argument);
}
