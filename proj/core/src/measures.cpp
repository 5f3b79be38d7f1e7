#include "taeblp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "taeblp/errors.hpp"

namespace taeblp {

namespace {

// Log-weights below max - kBroadSpan underflow relative to the bulk.
constexpr double kBroadSpan = 745.0;

double log_weight(double theta, double beta, long z) noexcept {
  const double zd = static_cast<double>(z);
  return theta * zd - 0.5 * beta * zd * zd;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

}  // namespace

RateParams::RateParams(double b) : beta(b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    std::ostringstream os;
    os << "beta must be a positive finite number, got " << b;
    throw ConfigError(os.str());
  }
}

double rate_f(long z, const RateParams& params) {
  if (std::abs(params.beta * static_cast<double>(z)) > kOverflowGuard) {
    std::ostringstream os;
    os << "rate argument z=" << z << " outside the admissible band for beta=" << params.beta;
    throw ConfigError(os.str());
  }
  return std::exp(params.beta * (static_cast<double>(z) - 0.5));
}

// ---------------------------------------------------------------------------

StationaryMarginal::StationaryMarginal(double theta, RateParams params, double tail_tol)
    : theta_(theta), beta_(params.beta), tail_tol_(tail_tol) {
  if (!(tail_tol > 0.0) || tail_tol > 1e-6) throw ConfigError("tail_tol must lie in (0, 1e-6]");
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");

  const long mode = std::lround(theta / beta_);
  const double lw_max = log_weight(theta, beta_, mode);

  // Broad range: every weight that does not underflow against the mode.
  long broad_lo = mode;
  long broad_hi = mode;
  while (log_weight(theta, beta_, broad_lo - 1) - lw_max > -kBroadSpan) --broad_lo;
  while (log_weight(theta, beta_, broad_hi + 1) - lw_max > -kBroadSpan) ++broad_hi;

  CompensatedSum z_sum;
  for (long z = broad_lo; z <= broad_hi; ++z) z_sum.add(std::exp(log_weight(theta, beta_, z) - lw_max));
  log_z_ = lw_max + std::log(z_sum.value());

  // Moments relative to the mode keep the symmetric cases exact.
  CompensatedSum first;
  for (long z = broad_lo; z <= broad_hi; ++z)
    first.add(static_cast<double>(z - mode) * std::exp(log_weight(theta, beta_, z) - log_z_));
  rho_ = static_cast<double>(mode) + first.value();
  CompensatedSum second;
  for (long z = broad_lo; z <= broad_hi; ++z) {
    const double dz = static_cast<double>(z) - rho_;
    second.add(dz * dz * std::exp(log_weight(theta, beta_, z) - log_z_));
  }
  var_ = second.value();

  // Sampling table: drop sites whose weight is far below the tolerance. The
  // weights are log-concave, so the neglected tail on each side is bounded by a
  // geometric series dominated by its first term.
  const double cut = std::log(tail_tol) - 8.0;
  long lo = mode;
  long hi = mode;
  while (log_pmf(lo - 1) > cut) --lo;
  while (log_pmf(hi + 1) > cut) ++hi;
  lo_ = static_cast<int>(lo);
  hi_ = static_cast<int>(hi);

  pmf_.resize(static_cast<std::size_t>(hi_ - lo_ + 1));
  cdf_.resize(pmf_.size());
  CompensatedSum acc;
  for (int z = lo_; z <= hi_; ++z) {
    const auto k = static_cast<std::size_t>(z - lo_);
    pmf_[k] = std::exp(log_pmf(z));
    acc.add(pmf_[k]);
    cdf_[k] = acc.value();
  }
}

double StationaryMarginal::partition() const { return std::exp(log_z_); }

double StationaryMarginal::log_pmf(long z) const noexcept {
  return log_weight(theta_, beta_, z) - log_z_;
}

double StationaryMarginal::pmf(long z) const { return std::exp(log_pmf(z)); }

double StationaryMarginal::cdf(long z) const noexcept {
  if (z < lo_) return 0.0;
  if (z >= hi_) return cdf_.back();
  return cdf_[static_cast<std::size_t>(z - lo_)];
}

int StationaryMarginal::quantile(double u) const noexcept {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return hi_;
  return lo_ + static_cast<int>(it - cdf_.begin());
}

// ---------------------------------------------------------------------------

SizeBiasedMarginal::SizeBiasedMarginal(const StationaryMarginal& base) : base_(base) {
  lo_ = base_.lo() - 2;
  hi_ = base_.hi() + 1;
  pmf_.resize(static_cast<std::size_t>(hi_ - lo_ + 1));
  cdf_.resize(pmf_.size());
  CompensatedSum acc;
  CompensatedSum mean;
  for (int y = lo_; y <= hi_; ++y) {
    const auto k = static_cast<std::size_t>(y - lo_);
    pmf_[k] = pmf(y);
    acc.add(pmf_[k]);
    mean.add(static_cast<double>(y) * pmf_[k]);
    cdf_[k] = acc.value();
  }
  mean_ = mean.value();
}

double SizeBiasedMarginal::forward_pmf(long y) const {
  const double rho = base_.density();
  const long start = std::max<long>(y + 1, std::lround(rho) - 200);
  CompensatedSum acc;
  for (long z = start;; ++z) {
    const double term = (static_cast<double>(z) - rho) * base_.pmf(z);
    acc.add(term);
    if (static_cast<double>(z) > rho + 1.0 && (term == 0.0 || term < 1e-20 * std::abs(acc.value()))) break;
    if (z > start + 100000) break;
  }
  return acc.value() / base_.variance();
}

double SizeBiasedMarginal::backward_pmf(long y) const {
  const double rho = base_.density();
  const long start = std::min<long>(y, std::lround(rho) + 200);
  CompensatedSum acc;
  for (long z = start;; --z) {
    const double term = (rho - static_cast<double>(z)) * base_.pmf(z);
    acc.add(term);
    if (static_cast<double>(z) < rho - 1.0 && (term == 0.0 || term < 1e-20 * std::abs(acc.value()))) break;
    if (z < start - 100000) break;
  }
  return acc.value() / base_.variance();
}

double SizeBiasedMarginal::pmf(long y) const {
  return static_cast<double>(y) >= base_.density() ? forward_pmf(y) : backward_pmf(y);
}

int SizeBiasedMarginal::quantile(double u) const noexcept {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return hi_;
  return lo_ + static_cast<int>(it - cdf_.begin());
}

// ---------------------------------------------------------------------------

GeometricLabelLaw::GeometricLabelLaw(double b) : beta(RateParams(b).beta) {}

double GeometricLabelLaw::pmf(long m) const noexcept {
  if (m < 0) return 0.0;
  return std::exp(-beta * static_cast<double>(m)) * -std::expm1(-beta);
}

double GeometricLabelLaw::cdf(long m) const noexcept {
  if (m < 0) return 0.0;
  return -std::expm1(-beta * static_cast<double>(m + 1));
}

double GeometricLabelLaw::tail(long m) const noexcept {
  if (m <= 0) return 1.0;
  return std::exp(-beta * static_cast<double>(m));
}

// ---------------------------------------------------------------------------

double theta_of_rho(double rho, const RateParams& params, double tail_tol) {
  if (!std::isfinite(rho)) throw ConfigError("density must be finite");
  const double beta = params.beta;
  // rho(k beta) = k, so [floor(rho), floor(rho) + 1] brackets the root.
  const double k = std::floor(rho);
  double lo = beta * k - 1e-9 * beta;
  double hi = beta * (k + 1.0) + 1e-9 * beta;
  double theta = std::clamp(beta * rho, lo, hi);
  const double tol = 1e-13 * std::max(1.0, std::abs(rho));

  for (int iter = 0; iter < 200; ++iter) {
    const StationaryMarginal m(theta, params, tail_tol);
    const double err = m.density() - rho;
    if (std::abs(err) <= tol) return theta;
    if (err < 0.0)
      lo = theta;
    else
      hi = theta;
    double next = theta - err / m.variance();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == theta || hi - lo < 1e-15 * std::max(1.0, std::abs(theta))) return next;
    theta = next;
  }
  std::ostringstream os;
  os << "theta_of_rho did not converge for rho=" << rho << " beta=" << beta;
  throw NumericError(os.str());
}

FluxSpeed flux_and_speed(double rho, const RateParams& params) {
  const double theta = theta_of_rho(rho, params);
  const StationaryMarginal m(theta, params);
  return FluxSpeed{std::exp(theta) + std::exp(-theta),
                   (std::exp(theta) - std::exp(-theta)) / m.variance()};
}

WalkRates rw_rates(double rho, const RateParams& params) {
  const double theta = theta_of_rho(rho, params);
  return WalkRates{std::exp(theta) * std::expm1(params.beta),
                   std::exp(-theta) * -std::expm1(-params.beta)};
}

// ---------------------------------------------------------------------------

OrderedPairSampler::OrderedPairSampler(double lam, double rho, RateParams params, bool strict,
                                       double tail_tol)
    : lower_(theta_of_rho(lam, params, tail_tol), params, tail_tol),
      upper_(theta_of_rho(rho, params, tail_tol), params, tail_tol),
      lower_hat_(lower_),
      upper_hat_(upper_),
      strict_(strict) {
  if (lam > rho) {
    std::ostringstream os;
    os << "ordered pair needs lam <= rho, got lam=" << lam << " rho=" << rho;
    throw ConfigError(os.str());
  }
}

std::pair<int, int> OrderedPairSampler::at(double u) const noexcept {
  if (strict_) return {lower_hat_.quantile(u), upper_hat_.quantile(u) + 1};
  return {lower_.quantile(u), upper_.quantile(u)};
}

// ---------------------------------------------------------------------------

ShockMeasure::ShockMeasure(double rho, RateParams params, double tail_tol)
    : rho_(rho),
      left_(theta_of_rho(rho, params, tail_tol) + params.beta, params, tail_tol),
      right_(theta_of_rho(rho, params, tail_tol), params, tail_tol) {}

double ShockMeasure::site_pmf(int site, int lower, int upper, int shock_site) const {
  if (site < shock_site) return lower == upper ? left_.pmf(lower) : 0.0;
  if (site == shock_site) return upper == lower + 1 ? right_.pmf(lower) : 0.0;
  return lower == upper ? right_.pmf(lower) : 0.0;
}

std::pair<std::vector<int>, std::vector<int>> ShockMeasure::sample(SiteRange window,
                                                                   Rng& rng) const {
  if (!window.contains(0)) throw ConfigError("shock window must contain site 0");
  std::vector<int> lower(static_cast<std::size_t>(window.size()));
  std::vector<int> upper(lower.size());
  for (int i = window.first; i <= window.last; ++i) {
    const auto k = static_cast<std::size_t>(i - window.first);
    if (i < 0) {
      lower[k] = upper[k] = left_.sample(rng);
    } else if (i == 0) {
      lower[k] = right_.sample(rng);
      upper[k] = lower[k] + 1;
    } else {
      lower[k] = upper[k] = right_.sample(rng);
    }
  }
  return {std::move(lower), std::move(upper)};
}

}  // namespace taeblp
