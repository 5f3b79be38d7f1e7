#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace taeblp {

/// A Monte Carlo estimate and its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Streaming central moments up to fourth order with an associative merge.
class Moments {
 public:
  void add(double x) noexcept;
  void merge(const Moments& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance.
  double variance() const noexcept;
  /// Standard error of the mean.
  double mean_se() const noexcept;
  /// Standard error of the sample variance, sqrt((m4 - m2^2) / n).
  double variance_se() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

Estimate mean_of(std::span<const double> xs);
Estimate variance_of(std::span<const double> xs);
/// Sample covariance; the error bar treats (x - xbar)(y - ybar) as iid.
Estimate covariance_of(std::span<const double> xs, std::span<const double> ys);
/// Binomial proportion of `hits` out of `n`.
Estimate proportion(std::uint64_t hits, std::uint64_t n);

/// Difference of two independent estimates with the combined error.
Estimate difference(const Estimate& a, const Estimate& b) noexcept;

/// Integer histogram keyed by value.
class Histogram {
 public:
  void add(long value, std::uint64_t weight = 1);
  void merge(const Histogram& other);
  std::uint64_t total() const noexcept { return total_; }
  const std::map<long, std::uint64_t>& bins() const noexcept { return bins_; }
  double frequency(long value) const;
  /// Empirical P(X >= m).
  double tail_at_least(long m) const;

 private:
  std::map<long, std::uint64_t> bins_;
  std::uint64_t total_ = 0;
};

/// Total variation between an empirical histogram and a law on the integers.
/// The reference law is summed over [lo, hi] and the mass it leaves outside
/// that range is added in full.
double total_variation(const Histogram& h, const std::function<double(long)>& pmf, long lo, long hi);

/// Total variation between two empirical histograms.
double total_variation(const Histogram& a, const Histogram& b);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
};
/// Pearson statistic after pooling cells with expected count below `min_expected`.
ChiSquare chi_square(const Histogram& h, const std::function<double(long)>& pmf, long lo, long hi,
                     double min_expected = 5.0);

/// Least squares line y = a + b x with standard errors from the given y errors.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> y_se);

}  // namespace taeblp
