#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "lak/error.hpp"
#include "lak/evalx.hpp"
#include "support/gen.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace lak::evalx;
using V = std::vector<double>;

TEST(Split, SizesAndSetLaws) {
  const auto s = split(10, 0.7, 1);
  EXPECT_EQ(s.train.size(), 7u);
  EXPECT_EQ(s.test.size(), 3u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 10u);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
}

TEST(Split, DeterministicPerSeed) {
  EXPECT_EQ(split(100, 0.7, 9).train, split(100, 0.7, 9).train);
  EXPECT_NE(split(100, 0.7, 9).train, split(100, 0.7, 10).train);
}

TEST(Split, Errors) {
  EXPECT_THROW((void)split(10, 0.0, 1), lak::InvalidArgument);
  EXPECT_THROW((void)split(10, 1.0, 1), lak::InvalidArgument);
  EXPECT_THROW((void)split(1, 0.5, 1), lak::InvalidArgument);
}

TEST(Split, ApplySelectsRows) {
  const std::vector<int> rows{10, 11, 12, 13};
  const auto [train, test] = apply_split<int>(rows, Split{{0, 2}, {1, 3}});
  EXPECT_EQ(train, (std::vector<int>{10, 12}));
  EXPECT_EQ(test, (std::vector<int>{11, 13}));
}

TEST(Regression, HandFixture) {
  const auto r = regression_metrics(V{1, 2, 3, 4}, V{1.5, 2, 2.5, 4});
  EXPECT_NEAR(r.mse, 0.125, 1e-12);
  EXPECT_NEAR(r.rmse, std::sqrt(0.125), 1e-12);
  EXPECT_NEAR(r.mae, 0.25, 1e-12);
  EXPECT_NEAR(*r.r_squared, 0.9, 1e-12);
  EXPECT_EQ(r.n, 4u);
}

TEST(Regression, PerfectAndMeanPredictors) {
  const V y{3, 1, 4, 1, 5};
  const auto perfect = regression_metrics(y, y);
  EXPECT_EQ(perfect.mse, 0);
  EXPECT_EQ(*perfect.r_squared, 1);
  EXPECT_EQ(*perfect.explained_variance, 1);
  const auto mean = regression_metrics(y, V(5, 2.8));
  EXPECT_NEAR(*mean.r_squared, 0, 1e-12);
}

TEST(Regression, UndefinedForConstantTruth) {
  const auto r = regression_metrics(V{2, 2, 2}, V{1, 2, 3});
  EXPECT_FALSE(r.r_squared);
  EXPECT_FALSE(r.explained_variance);
  EXPECT_NE(render_text(r).find("undefined"), std::string::npos);
  EXPECT_NE(render_json(r).find("null"), std::string::npos);
  EXPECT_THROW((void)regression_metrics(V{1, 2}, V{1}), lak::InvalidArgument);
}

TEST(Classification, HandConfusion) {
  // actual 0: predicted 0,0,1; actual 1: predicted 1,1,0.
  const auto c = classification_metrics(V{0, 0, 0, 1, 1, 1}, V{0, 0, 1, 1, 1, 0});
  EXPECT_EQ(c.confusion[0][0], 2u);
  EXPECT_EQ(c.confusion[0][1], 1u);
  EXPECT_EQ(c.confusion[1][0], 1u);
  EXPECT_EQ(c.confusion[1][1], 2u);
  EXPECT_NEAR(c.accuracy, 4.0 / 6, 1e-12);
  EXPECT_NEAR(c.precision, 2.0 / 3, 1e-12);
  EXPECT_NEAR(c.recall, 2.0 / 3, 1e-12);
  EXPECT_NEAR(c.f1, 2.0 / 3, 1e-12);
  EXPECT_EQ(c.n(), 6u);
}

TEST(Classification, DegenerateCases) {
  const auto perfect = classification_metrics(V{0, 1, 1}, V{0, 1, 1});
  EXPECT_EQ(perfect.accuracy, 1);
  EXPECT_EQ(perfect.f1, 1);
  const auto zeros = classification_metrics(V{0, 1, 1}, V{0, 0, 0});
  EXPECT_EQ(zeros.recall, 0);
  EXPECT_TRUE(zeros.precision_undefined);
  EXPECT_FALSE(zeros.recall_undefined);
  EXPECT_THROW((void)classification_metrics(V{0, 2}, V{0, 1}), lak::InvalidArgument);
}

TEST(EvalxProperty, AffineShiftInvariance) {
  lak::test::for_all(61, 200, [](lak::test::Gen& g, std::size_t i) {
    const std::size_t n = g.size(2, 50);
    auto y = g.reals(n, -100, 100);
    auto yh = g.reals(n, -100, 100);
    const auto base = regression_metrics(y, yh);
    ASSERT_TRUE(base.r_squared);
    EXPECT_LE(*base.r_squared, 1.0);
    const double c = g.real(-1000, 1000);
    for (std::size_t k = 0; k < n; ++k) y[k] += c, yh[k] += c;
    const auto shifted = regression_metrics(y, yh);
    EXPECT_NEAR(*shifted.r_squared, *base.r_squared, 1e-9 * (1 + std::abs(*base.r_squared))) << "case " << i;
  });
}

TEST(EvalxProperty, ExplainedVarianceEqualsR2WhenResidualsCentered) {
  lak::test::for_all(62, 200, [](lak::test::Gen& g, std::size_t i) {
    const std::size_t n = g.size(2, 40);
    const auto y = g.reals(n, 0, 100);
    auto yh = g.reals(n, 0, 100);
    double mean_res = 0;
    for (std::size_t k = 0; k < n; ++k) mean_res += (y[k] - yh[k]) / static_cast<double>(n);
    for (double& v : yh) v += mean_res;
    const auto r = regression_metrics(y, yh);
    EXPECT_NEAR(*r.explained_variance, *r.r_squared, 1e-9 * (1 + std::abs(*r.r_squared))) << "case " << i;
  });
}

TEST(EvalxProperty, PermutationInvariance) {
  lak::test::for_all(63, 100, [](lak::test::Gen& g, std::size_t i) {
    const std::size_t n = g.size(2, 40);
    std::vector<std::pair<double, double>> pairs(n);
    for (auto& p : pairs) p = {g.real(0, 10), g.real(0, 10)};
    auto metrics = [&] {
      V y, yh;
      for (const auto& [a, b] : pairs) y.push_back(a), yh.push_back(b);
      return regression_metrics(y, yh);
    };
    const auto a = metrics();
    g.shuffle(pairs);
    const auto b = metrics();
    EXPECT_NEAR(a.mse, b.mse, 1e-12) << "case " << i;
    EXPECT_NEAR(a.mae, b.mae, 1e-12) << "case " << i;
    EXPECT_NEAR(*a.r_squared, *b.r_squared, 1e-9) << "case " << i;
  });
}

TEST(PairedCsv, JoinsByKeyOrPosition) {
  lak::test::TempDir dir("evalx");
  {
    std::ofstream(dir / "p.csv") << "student_id,prediction\ns2,20\ns1,10.5\n";
    std::ofstream(dir / "t.csv") << "student_id,total_100\ns1,10\ns2,21\n";
    std::ofstream(dir / "p2.csv") << "y\n1\n2\n";
    std::ofstream(dir / "t2.csv") << "y\n1.5\n2\n";
  }
  const auto keyed = read_paired_csv((dir / "p.csv").string(), (dir / "t.csv").string());
  EXPECT_EQ(keyed.truth, (V{10, 21}));
  EXPECT_EQ(keyed.predicted, (V{10.5, 20}));
  const auto positional = read_paired_csv((dir / "p2.csv").string(), (dir / "t2.csv").string());
  EXPECT_EQ(positional.predicted, (V{1, 2}));
  EXPECT_EQ(positional.truth, (V{1.5, 2}));
  EXPECT_THROW((void)read_paired_csv((dir / "p.csv").string(), (dir / "t2.csv").string()), lak::Error);
}

}  // namespace
