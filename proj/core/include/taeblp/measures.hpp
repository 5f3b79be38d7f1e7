#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "taeblp/rng.hpp"

namespace taeblp {

/// Largest admissible |beta * z| in a rate evaluation.
inline constexpr double kOverflowGuard = 80.0;
inline constexpr double kDefaultTailTol = 1e-12;

/// Parameter of the exponential rate family f(z) = exp(beta (z - 1/2)).
struct RateParams {
  explicit RateParams(double beta);
  double beta;
};

/// Deposition rate f(z). Throws ConfigError past the overflow guard.
double rate_f(long z, const RateParams& params);

/// Inclusive range of lattice sites.
struct SiteRange {
  int first;
  int last;
  int size() const noexcept { return last - first + 1; }
  bool contains(int i) const noexcept { return i >= first && i <= last; }
};

/// Product-measure marginal with weights exp(theta z - beta z^2 / 2).
///
/// The table covers [lo, hi] such that the neglected mass is below tail_tol.
/// Immutable after construction; sampling takes the rng explicitly.
class StationaryMarginal {
 public:
  StationaryMarginal(double theta, RateParams params, double tail_tol = kDefaultTailTol);

  double theta() const noexcept { return theta_; }
  double beta() const noexcept { return beta_; }
  double log_partition() const noexcept { return log_z_; }
  double partition() const;
  double density() const noexcept { return rho_; }
  double variance() const noexcept { return var_; }
  double tail_tol() const noexcept { return tail_tol_; }

  int lo() const noexcept { return lo_; }
  int hi() const noexcept { return hi_; }

  /// Exact closed-form probability at any integer (not limited to the table).
  double pmf(long z) const;
  /// log pmf, finite everywhere.
  double log_pmf(long z) const noexcept;
  /// Tabulated CDF at z (0 below lo, ~1 above hi).
  double cdf(long z) const noexcept;

  std::span<const double> table() const noexcept { return pmf_; }

  /// Inverse-CDF value for u in [0, 1).
  int quantile(double u) const noexcept;
  int sample(Rng& rng) const noexcept { return quantile(uniform01(rng)); }

 private:
  double theta_;
  double beta_;
  double tail_tol_;
  double log_z_ = 0.0;
  double rho_ = 0.0;
  double var_ = 0.0;
  int lo_ = 0;
  int hi_ = 0;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// Size-biased marginal placed under a single second class particle:
///   hat mu(y) = sum_{z > y} (z - rho) mu(z) / Var(omega).
class SizeBiasedMarginal {
 public:
  explicit SizeBiasedMarginal(const StationaryMarginal& base);

  const StationaryMarginal& base() const noexcept { return base_; }
  double density() const noexcept { return base_.density(); }

  /// Tabulated probability (forward form above the mean, backward below).
  double pmf(long y) const;
  /// sum_{z > y} (z - rho) mu(z) / Var, summed directly.
  double forward_pmf(long y) const;
  /// sum_{z <= y} (rho - z) mu(z) / Var, summed directly.
  double backward_pmf(long y) const;

  double mean() const noexcept { return mean_; }
  int lo() const noexcept { return lo_; }
  int hi() const noexcept { return hi_; }
  std::span<const double> table() const noexcept { return pmf_; }

  int quantile(double u) const noexcept;
  int sample(Rng& rng) const noexcept { return quantile(uniform01(rng)); }

 private:
  StationaryMarginal base_;
  int lo_ = 0;
  int hi_ = 0;
  double mean_ = 0.0;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// Geometric law nu(m) = exp(-beta m)(1 - exp(-beta)) on m >= 0.
struct GeometricLabelLaw {
  explicit GeometricLabelLaw(double beta);
  double pmf(long m) const noexcept;
  double cdf(long m) const noexcept;
  /// P(m' >= m).
  double tail(long m) const noexcept;
  double beta;
};

/// Density rho(theta) inverted by safeguarded Newton iteration.
double theta_of_rho(double rho, const RateParams& params, double tail_tol = kDefaultTailTol);

struct FluxSpeed {
  double flux;   ///< exp(theta) + exp(-theta)
  double speed;  ///< d flux / d rho
};
FluxSpeed flux_and_speed(double rho, const RateParams& params);

/// Jump rates of the second class particle started from the shock measure.
struct WalkRates {
  double right;
  double left;
};
WalkRates rw_rates(double rho, const RateParams& params);

/// Monotone coupling of two marginals through a shared uniform.
///
/// Plain variant: (y, z) with y ~ mu^lam, z ~ mu^rho, y <= z.
/// Strict variant: y ~ hat mu^lam, z ~ hat mu^rho + 1, y < z.
class OrderedPairSampler {
 public:
  OrderedPairSampler(double lam, double rho, RateParams params, bool strict,
                     double tail_tol = kDefaultTailTol);

  std::pair<int, int> operator()(Rng& rng) const noexcept { return at(uniform01(rng)); }
  std::pair<int, int> at(double u) const noexcept;

  bool strict() const noexcept { return strict_; }
  const StationaryMarginal& lower() const noexcept { return lower_; }
  const StationaryMarginal& upper() const noexcept { return upper_; }

 private:
  StationaryMarginal lower_;
  StationaryMarginal upper_;
  SizeBiasedMarginal lower_hat_;
  SizeBiasedMarginal upper_hat_;
  bool strict_;
};

/// Product shock measure: equal pairs at density rho+1 left of the shock,
/// (y, y+1) with y ~ mu^rho at the shock site, equal pairs at rho to its right.
class ShockMeasure {
 public:
  ShockMeasure(double rho, RateParams params, double tail_tol = kDefaultTailTol);

  double rho() const noexcept { return rho_; }
  const StationaryMarginal& left() const noexcept { return left_; }
  const StationaryMarginal& right() const noexcept { return right_; }

  /// Probability of the pair (lower, upper) at `site` for a shock at `shock_site`.
  double site_pmf(int site, int lower, int upper, int shock_site = 0) const;

  /// Lower and upper fields over `window` with the shock at site 0.
  std::pair<std::vector<int>, std::vector<int>> sample(SiteRange window, Rng& rng) const;

 private:
  double rho_;
  StationaryMarginal left_;
  StationaryMarginal right_;
};

}  // namespace taeblp
