#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "taeblp/stats.hpp"

using namespace taeblp;

TEST(Moments, SmallSample) {
  Moments m;
  for (double x : {1.0, 2.0, 4.0, 7.0}) m.add(x);
  EXPECT_EQ(m.count(), 4u);
  EXPECT_DOUBLE_EQ(m.mean(), 3.5);
  EXPECT_DOUBLE_EQ(m.variance(), 7.0);
  EXPECT_DOUBLE_EQ(m.mean_se(), std::sqrt(7.0 / 4.0));
  // m2 = 21/4, m4 = (2.5^4 + 1.5^4 + 0.5^4 + 3.5^4) / 4
  const double m4 = (39.0625 + 5.0625 + 0.0625 + 150.0625) / 4.0;
  EXPECT_NEAR(m.variance_se(), std::sqrt((m4 - 5.25 * 5.25) / 4.0), 1e-12);
}

TEST(Moments, MergeEqualsSequential) {
  Moments all;
  Moments a;
  Moments b;
  for (int k = 0; k < 100; ++k) {
    const double x = std::sin(k * 0.7) * 3 + k * 0.01;
    all.add(x);
    (k < 37 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.count(), all.count());
  EXPECT_NEAR(a.mean(), all.mean(), 1e-13);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-12);
  EXPECT_NEAR(a.variance_se(), all.variance_se(), 1e-12);
  Moments empty;
  a.merge(empty);
  EXPECT_EQ(a.count(), all.count());
}

TEST(Estimates, CovarianceAndProportion) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  EXPECT_NEAR(covariance_of(x, y).value, 2.0 * variance_of(x).value, 1e-14);
  const Estimate p = proportion(25, 100);
  EXPECT_DOUBLE_EQ(p.value, 0.25);
  EXPECT_DOUBLE_EQ(p.se, std::sqrt(0.25 * 0.75 / 100));
  const Estimate d = difference({1.0, 3.0}, {0.5, 4.0});
  EXPECT_DOUBLE_EQ(d.value, 0.5);
  EXPECT_DOUBLE_EQ(d.se, 5.0);
}

TEST(Histogram, FrequenciesAndDistances) {
  Histogram h;
  h.add(0, 3);
  h.add(1);
  EXPECT_DOUBLE_EQ(h.frequency(0), 0.75);
  EXPECT_DOUBLE_EQ(h.tail_at_least(1), 0.25);
  Histogram g;
  g.add(1, 2);
  g.add(2, 2);
  EXPECT_DOUBLE_EQ(total_variation(h, g), 0.75);
  const auto pmf = [](long k) { return k == 0 ? 0.75 : (k == 1 ? 0.25 : 0.0); };
  EXPECT_NEAR(total_variation(h, pmf, 0, 1), 0.0, 1e-15);
  // Mass the reference law leaves outside [lo, hi] counts in full.
  const auto wide = [](long k) { return k == 0 ? 0.5 : (k == 1 ? 0.25 : (k == 5 ? 0.25 : 0.0)); };
  EXPECT_NEAR(total_variation(h, wide, 0, 1), 0.25, 1e-15);
  h.merge(g);
  EXPECT_EQ(h.total(), 8u);
}

TEST(ChiSquare, SmallTailFormsLastCell) {
  Histogram h;
  h.add(0, 500);
  h.add(1, 500);
  h.add(2, 1);
  const auto pmf = [](long k) { return k == 2 ? 0.001 : 0.4995; };
  const ChiSquare c = chi_square(h, pmf, 0, 2);
  EXPECT_EQ(c.dof, 2);
  EXPECT_LT(c.statistic, 1.0);
}

TEST(LineFit, RecoversExactLine) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const std::vector<double> s{0.1, 0.1, 0.2, 0.2};
  const LineFit f = weighted_line_fit(x, y, s);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_GT(f.slope_se, 0.0);
}
