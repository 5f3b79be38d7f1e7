#include <gtest/gtest.h>

#include <cmath>

#include "taeblp/errors.hpp"
#include "taeblp/oracle.hpp"

using namespace taeblp;

TEST(RefreshOracle, TablesPass) {
  for (double beta : {0.1, 0.25, 0.5, 1.0, 2.0}) {
    const CheckReport r = check_refresh_tables(beta, 80);
    EXPECT_TRUE(r.pass) << beta << ": " << r.detail;
    EXPECT_LT(r.max_error, kAlgebraTol);
  }
}

TEST(RefreshOracle, PerturbedTableFails) {
  for (double eps : {1e-6, -1e-6, 1e-3}) {
    const RefreshTable bad(1.0, eps);
    EXPECT_FALSE(check_refresh_tables(1.0, 20, bad).pass) << eps;
  }
}

TEST(RefreshOracle, DominationHolds) {
  for (double beta : {0.5, 1.0, 2.0}) {
    for (int a = -6; a <= 8; ++a) {
      for (int b = a; b <= a + 10; ++b) {
        const DominationResult r = check_label_domination(beta, a, b);
        EXPECT_TRUE(r.report.pass) << beta << " [" << a << "," << b << "] " << r.report.detail;
        double s = 0.0;
        double s_star = 0.0;
        for (double x : r.nu) s += x;
        for (double x : r.nu_star) s_star += x;
        EXPECT_NEAR(s, s_star, 1e-14);
      }
    }
  }
}

TEST(RefreshOracle, DominationDetectsPerturbation) {
  const RefreshTable bad(1.0, 1e-6);
  bool failed = false;
  for (int a = 0; a <= 5 && !failed; ++a)
    for (int b = a + 1; b <= a + 6 && !failed; ++b)
      failed = !check_label_domination(1.0, a, b, bad).report.pass;
  EXPECT_TRUE(failed);
}

TEST(MeasureOracle, Identities) {
  for (double beta : {0.25, 1.0, 2.0}) {
    const CheckReport r = check_measure_identities(beta);
    EXPECT_TRUE(r.pass) << r.detail;
  }
}

TEST(GeneratorOracle, ThetaStationarity) {
  const auto suite = site_function_suite(3);
  ASSERT_GE(suite.size(), 8u);
  for (double theta : {0.0, 0.6}) {
    const ResidualReport r = stationarity_residual(theta, 1.0, 3, Boundary::theta, 25, suite);
    EXPECT_LT(r.max_residual, 1e-6) << theta;
    EXPECT_LT(r.neglected_mass, 1e-12);
    EXPECT_EQ(r.residuals.size(), suite.size());
  }
}

TEST(GeneratorOracle, ShockGenerator) {
  const auto suite = pair_function_suite();
  for (double rho : {0.0, 0.5}) {
    const ResidualReport r = shock_generator_residual(rho, 1.0, 25, suite);
    EXPECT_LT(r.max_residual, 1e-6) << rho;
  }
}

// Frozen values from an independent 30-digit evaluation (rates at rho = 0, beta = 1).
TEST(WalkLaw, FrozenValues) {
  const double right = std::expm1(1.0);
  const double left = -std::expm1(-1.0);
  const double expected[] = {0.013811380560479328, 0.02755913894919546, 0.048442703773234064,
                             0.07491350661357593,  0.102053065765062,   0.12291323728136415};
  for (long k = -2; k <= 3; ++k)
    EXPECT_NEAR(rw_law(right, left, 4.0, k), expected[k + 2], 1e-14) << k;
  double mass = 0.0;
  double mean = 0.0;
  double second = 0.0;
  for (long k = -60; k <= 80; ++k) {
    const double p = rw_law(right, left, 4.0, k);
    mass += p;
    mean += k * p;
    second += double(k) * k * p;
  }
  EXPECT_NEAR(mass, 1.0, 1e-14);
  EXPECT_NEAR(mean, 4.34464507852195, 1e-12);
  EXPECT_NEAR(second - mean * mean, 9.401609549150412, 1e-11);
  EXPECT_NEAR(rate_f(1, RateParams(1.0)) - rate_f(0, RateParams(1.0)), 1.0421906109874947, 1e-15);
}

TEST(VerifySuite, AllPass) {
  const auto reports = run_verify_suite(VerifyOptions{});
  EXPECT_GE(reports.size(), 7u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << ": " << r.detail;
}

TEST(VerifySuite, RejectsBadOptions) {
  VerifyOptions o;
  o.betas = {0.0};
  EXPECT_THROW(run_verify_suite(o), ConfigError);
  o.betas = {1.0};
  o.d_max = 1;
  EXPECT_THROW(run_verify_suite(o), ConfigError);
}
