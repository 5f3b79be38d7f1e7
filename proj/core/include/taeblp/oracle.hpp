#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "taeblp/convexity.hpp"
#include "taeblp/lattice.hpp"
#include "taeblp/measures.hpp"

namespace taeblp {

/// Outcome of one exact check. `detail` names the first failing point.
struct CheckReport {
  std::string id;
  bool pass = true;
  double max_error = 0.0;
  std::string detail;
};

inline constexpr double kAlgebraTol = 1e-12;

/// Joint refresh table against independent laws built from f-differences:
/// masses nonnegative and normalized, margins equal the y/z laws, p(1)=q(1)=1,
/// p(2)+q(2)=1, and lines 2, 4, 5 empty at d = 2.
CheckReport check_refresh_tables(double beta, int d_max, const RefreshTable& table);
CheckReport check_refresh_tables(double beta, int d_max);

/// Push the geometric law through the z refresh on [a, b] and compare CDFs.
struct DominationResult {
  CheckReport report;
  std::vector<double> nu;       ///< indexed from `first`
  std::vector<double> nu_star;  ///< indexed from `first`
  int first = 0;
};
DominationResult check_label_domination(double beta, int a, int b, const RefreshTable& table);
DominationResult check_label_domination(double beta, int a, int b);

/// Shift identities of the stationary marginal and convexity of the flux.
CheckReport check_measure_identities(double beta, double tol = 1e-9);

/// Cylinder test functions on a few consecutive sites (fixed, versioned suite).
struct SiteFunction {
  std::string name;
  std::function<double(std::span<const int>)> phi;
};
inline constexpr int kSiteSuiteVersion = 1;
std::vector<SiteFunction> site_function_suite(int sites);

struct ResidualReport {
  double max_residual = 0.0;
  double neglected_mass = 0.0;
  std::vector<std::pair<std::string, double>> residuals;
};

/// sum_omega mu^theta(omega) (G phi)(omega) by exact summation over `sites`
/// consecutive bulk sites, each restricted to values within `band` of the mode
/// whose probability is at least 1e-40.
ResidualReport stationarity_residual(double theta, double beta, int sites, Boundary boundary,
                                     int band, std::span<const SiteFunction> suite);

/// Test functions of a coupled pair on the window {-1, 0, 1}.
/// Arguments are (lower, upper) values at sites -1, 0, 1.
struct PairFunction {
  std::string name;
  std::function<double(std::span<const int>, std::span<const int>)> phi;
};
inline constexpr int kPairSuiteVersion = 1;
std::vector<PairFunction> pair_function_suite();

/// E_{shock}[L_pair phi] minus the random walk right-hand side at t = 0.
ResidualReport shock_generator_residual(double rho, double beta, int band,
                                        std::span<const PairFunction> suite);

/// P(N_right(t) - N_left(t) = k) for independent Poisson streams.
double rw_law(double right, double left, double t, long k);

/// Options for the full verification suite.
struct VerifyOptions {
  std::vector<double> betas{0.25, 0.5, 1.0, 2.0};
  int d_max = 60;
  double p_perturbation = 0.0;
};
std::vector<CheckReport> run_verify_suite(const VerifyOptions& options);

}  // namespace taeblp
