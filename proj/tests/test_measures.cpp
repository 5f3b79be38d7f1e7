#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "taeblp/errors.hpp"
#include "taeblp/measures.hpp"

using namespace taeblp;

namespace {
const RateParams kB1(1.0);
}

// Frozen values from an independent 30-digit evaluation.
TEST(Rates, FrozenValues) {
  EXPECT_NEAR(rate_f(0, kB1), 0.6065306597126334, 1e-15);
  EXPECT_NEAR(rate_f(1, kB1), 1.6487212707001282, 1e-15);
  EXPECT_NEAR(rate_f(-3, RateParams(0.5)), 0.17377394345044513, 1e-15);
}

TEST(Rates, RejectsBadBeta) {
  EXPECT_THROW(RateParams(0.0), ConfigError);
  EXPECT_THROW(RateParams(-1.0), ConfigError);
  EXPECT_THROW(RateParams(std::numeric_limits<double>::quiet_NaN()), ConfigError);
  EXPECT_THROW(RateParams(std::numeric_limits<double>::infinity()), ConfigError);
}

TEST(Rates, OverflowGuard) {
  EXPECT_THROW(rate_f(1000, kB1), ConfigError);
  EXPECT_NO_THROW(rate_f(60, kB1));
}

TEST(StationaryMarginal, FrozenValues) {
  const StationaryMarginal m(0.0, kB1);
  EXPECT_NEAR(m.partition(), 2.5066282880429055, 1e-13);
  EXPECT_NEAR(m.pmf(0), 0.3989422782668617, 1e-15);
  EXPECT_NEAR(m.variance(), 0.9999997887677281, 1e-13);
  EXPECT_NEAR(m.density(), 0.0, 1e-15);
  EXPECT_NEAR(StationaryMarginal(0.0, RateParams(0.5)).variance(), 1.9999999999999977, 1e-12);
}

TEST(StationaryMarginal, TableIsNormalizedAndMatchesPmf) {
  for (double theta : {-2.3, 0.0, 0.7, 4.1}) {
    const StationaryMarginal m(theta, kB1);
    double sum = 0.0;
    for (int z = m.lo(); z <= m.hi(); ++z) {
      sum += m.pmf(z);
      EXPECT_NEAR(std::log(m.pmf(z)), m.log_pmf(z), 1e-12);
    }
    EXPECT_NEAR(sum, 1.0, 1e-11);
  }
}

TEST(StationaryMarginal, ShiftIdentities) {
  for (double beta : {0.25, 1.0, 2.0}) {
    const RateParams p(beta);
    for (double theta : {-1.5, 0.0, 0.4}) {
      const StationaryMarginal a(theta, p);
      const StationaryMarginal b(theta + beta, p);
      EXPECT_NEAR(b.log_partition(), a.log_partition() + theta + beta / 2, 1e-10);
      EXPECT_NEAR(b.density(), a.density() + 1.0, 1e-10);
      for (int z = -20; z <= 20; ++z) EXPECT_NEAR(b.log_pmf(z), a.log_pmf(z - 1), 1e-10);
    }
  }
}

TEST(StationaryMarginal, SamplingMatchesMean) {
  const StationaryMarginal m(0.8, kB1);
  Rng rng = make_stream(11, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) sum += m.sample(rng);
  EXPECT_NEAR(sum / n, m.density(), 5.0 * std::sqrt(m.variance() / n));
}

TEST(StationaryMarginal, RejectsBadTailTol) {
  EXPECT_THROW(StationaryMarginal(0.0, kB1, 0.0), ConfigError);
  EXPECT_THROW(StationaryMarginal(0.0, kB1, 1e-3), ConfigError);
}

TEST(ThetaOfRho, RoundTripAndShift) {
  for (double beta : {0.25, 0.5, 1.0, 2.0}) {
    const RateParams p(beta);
    for (double rho = -3.0; rho <= 3.0; rho += 0.37) {
      const double th = theta_of_rho(rho, p);
      EXPECT_NEAR(StationaryMarginal(th, p).density(), rho, 1e-11);
      EXPECT_NEAR(theta_of_rho(rho + 1.0, p), th + beta, 1e-9);
    }
  }
}

TEST(FluxSpeed, FrozenValues) {
  const FluxSpeed fs = flux_and_speed(1.0, kB1);
  EXPECT_NEAR(fs.flux, 3.0861612696304876, 1e-11);
  EXPECT_NEAR(fs.speed, 2.350402883768544, 1e-10);
  EXPECT_NEAR(flux_and_speed(0.0, kB1).speed, 0.0, 1e-12);
}

TEST(FluxSpeed, SpeedIsFluxDerivative) {
  for (double rho : {-1.0, 0.3, 1.7}) {
    const double h = 1e-4;
    const double num =
        (flux_and_speed(rho + h, kB1).flux - flux_and_speed(rho - h, kB1).flux) / (2 * h);
    EXPECT_NEAR(flux_and_speed(rho, kB1).speed, num, 1e-6);
  }
}

TEST(WalkRates, FrozenValues) {
  const WalkRates r = rw_rates(0.0, kB1);
  EXPECT_NEAR(r.right, 1.718281828459045, 1e-13);
  EXPECT_NEAR(r.left, 0.6321205588285577, 1e-13);
}

TEST(SizeBiased, NormalizedAndBothFormsAgree) {
  for (double theta : {-1.0, 0.0, 0.9}) {
    const SizeBiasedMarginal hat(StationaryMarginal(theta, kB1));
    double sum = 0.0;
    for (int y = hat.lo(); y <= hat.hi(); ++y) {
      sum += hat.pmf(y);
      EXPECT_NEAR(hat.forward_pmf(y), hat.backward_pmf(y), 1e-13);
      EXPECT_GE(hat.pmf(y), 0.0);
    }
    EXPECT_NEAR(sum, 1.0, 1e-11);
  }
}

// The ratio hat mu / mu grows like (rho - y) / Var, so it is bounded only on
// finite ranges; on [-30, 30] its maximum is 30.0000063 at theta = 0.
TEST(SizeBiased, RatioBoundOnFiniteRange) {
  const StationaryMarginal m(0.0, kB1);
  const SizeBiasedMarginal hat(m);
  double worst = 0.0;
  for (int y = -30; y <= 30; ++y) worst = std::max(worst, hat.pmf(y) / m.pmf(y));
  EXPECT_NEAR(worst, 30.0000063, 1e-6);
}

TEST(GeometricLaw, FrozenValues) {
  const GeometricLabelLaw nu(1.0);
  EXPECT_NEAR(nu.pmf(1), 0.23254415793482963, 1e-15);
  EXPECT_NEAR(nu.tail(3), std::exp(-3.0), 1e-15);
  EXPECT_NEAR(nu.cdf(2) + nu.tail(3), 1.0, 1e-15);
  EXPECT_EQ(nu.pmf(-1), 0.0);
}

TEST(OrderedPairSampler, Ordering) {
  const OrderedPairSampler plain(0.2, 1.1, kB1, false);
  const OrderedPairSampler strict(0.2, 1.1, kB1, true);
  for (int k = 0; k < 1000; ++k) {
    const double u = (k + 0.5) / 1000.0;
    const auto [a, b] = plain.at(u);
    const auto [c, d] = strict.at(u);
    EXPECT_LE(a, b);
    EXPECT_LT(c, d);
  }
  EXPECT_THROW(OrderedPairSampler(1.0, 0.5, kB1, false), ConfigError);
}

TEST(ShockMeasure, SitePmfAndSample) {
  const ShockMeasure s(0.0, kB1);
  EXPECT_NEAR(s.left().density(), 1.0, 1e-10);
  EXPECT_NEAR(s.right().density(), 0.0, 1e-10);
  double at_shock = 0.0;
  for (int y = -30; y <= 30; ++y) at_shock += s.site_pmf(0, y, y + 1);
  EXPECT_NEAR(at_shock, 1.0, 1e-12);
  EXPECT_EQ(s.site_pmf(0, 0, 0), 0.0);
  EXPECT_EQ(s.site_pmf(-1, 0, 1), 0.0);
  Rng rng = make_stream(3, 0);
  const auto [lo, up] = s.sample(SiteRange{-5, 5}, rng);
  for (int i = -5; i <= 5; ++i) {
    const auto k = static_cast<std::size_t>(i + 5);
    EXPECT_EQ(up[k] - lo[k], i == 0 ? 1 : 0);
  }
}
