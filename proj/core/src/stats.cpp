#include "taeblp/stats.hpp"

#include <algorithm>
#include <cmath>

#include "taeblp/errors.hpp"

namespace taeblp {

void Moments::add(double x) noexcept {
  Moments one;
  one.n_ = 1;
  one.mean_ = x;
  merge(one);
}

// Pairwise update of central moment sums (Pebay 2008 form).
void Moments::merge(const Moments& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d_n = delta / n;
  const double d_n2 = d_n * d_n;
  const double m2 = m2_ + o.m2_ + delta * d_n * na * nb;
  const double m3 = m3_ + o.m3_ + delta * d_n2 * na * nb * (na - nb) +
                    3.0 * d_n * (na * o.m2_ - nb * m2_);
  const double m4 = m4_ + o.m4_ + delta * d_n * d_n2 * na * nb * (na * na - na * nb + nb * nb) +
                    6.0 * d_n2 * (na * na * o.m2_ + nb * nb * m2_) +
                    4.0 * d_n * (na * o.m3_ - nb * m3_);
  n_ += o.n_;
  mean_ += d_n * nb;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
}

double Moments::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double Moments::mean_se() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double Moments::variance_se() const noexcept {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double c2 = m2_ / n;
  const double c4 = m4_ / n;
  return std::sqrt(std::max(c4 - c2 * c2, 0.0) / n);
}

Estimate mean_of(std::span<const double> xs) {
  Moments m;
  for (double x : xs) m.add(x);
  return {m.mean(), m.mean_se()};
}

Estimate variance_of(std::span<const double> xs) {
  Moments m;
  for (double x : xs) m.add(x);
  return {m.variance(), m.variance_se()};
}

Estimate covariance_of(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InternalError("covariance_of: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) return {};
  const double mx = mean_of(xs).value;
  const double my = mean_of(ys).value;
  Moments prod;
  for (std::size_t k = 0; k < n; ++k) prod.add((xs[k] - mx) * (ys[k] - my));
  const double nd = static_cast<double>(n);
  return {prod.mean() * nd / (nd - 1.0), prod.mean_se()};
}

Estimate proportion(std::uint64_t hits, std::uint64_t n) {
  if (n == 0) return {};
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

Estimate difference(const Estimate& a, const Estimate& b) noexcept {
  return {a.value - b.value, std::hypot(a.se, b.se)};
}

void Histogram::add(long value, std::uint64_t weight) {
  bins_[value] += weight;
  total_ += weight;
}

void Histogram::merge(const Histogram& other) {
  for (const auto& [v, c] : other.bins_) add(v, c);
}

double Histogram::frequency(long value) const {
  if (total_ == 0) return 0.0;
  const auto it = bins_.find(value);
  return it == bins_.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_);
}

double Histogram::tail_at_least(long m) const {
  if (total_ == 0) return 0.0;
  std::uint64_t c = 0;
  for (auto it = bins_.lower_bound(m); it != bins_.end(); ++it) c += it->second;
  return static_cast<double>(c) / static_cast<double>(total_);
}

double total_variation(const Histogram& h, const std::function<double(long)>& pmf, long lo, long hi) {
  double sum = 0.0;
  double covered = 0.0;
  for (long k = lo; k <= hi; ++k) {
    const double p = pmf(k);
    covered += p;
    sum += std::abs(h.frequency(k) - p);
  }
  for (const auto& [v, c] : h.bins())
    if (v < lo || v > hi) sum += h.frequency(v);
  sum += std::max(0.0, 1.0 - covered);
  return 0.5 * sum;
}

double total_variation(const Histogram& a, const Histogram& b) {
  double sum = 0.0;
  for (const auto& [v, c] : a.bins()) sum += std::abs(a.frequency(v) - b.frequency(v));
  for (const auto& [v, c] : b.bins())
    if (!a.bins().contains(v)) sum += b.frequency(v);
  return 0.5 * sum;
}

ChiSquare chi_square(const Histogram& h, const std::function<double(long)>& pmf, long lo, long hi,
                     double min_expected) {
  const double n = static_cast<double>(h.total());
  ChiSquare out;
  double pool_obs = 0.0;
  double pool_exp = 0.0;
  double covered = 0.0;
  int cells = 0;
  const auto close_cell = [&](double obs, double exp) {
    out.statistic += (obs - exp) * (obs - exp) / exp;
    ++cells;
  };
  for (long k = lo; k <= hi; ++k) {
    const double p = pmf(k);
    covered += p;
    const auto it = h.bins().find(k);
    pool_obs += it == h.bins().end() ? 0.0 : static_cast<double>(it->second);
    pool_exp += n * p;
    if (pool_exp >= min_expected) {
      close_cell(pool_obs, pool_exp);
      pool_obs = pool_exp = 0.0;
    }
  }
  // Everything outside [lo, hi] plus any unfinished pool forms the last cell.
  for (const auto& [v, c] : h.bins())
    if (v < lo || v > hi) pool_obs += static_cast<double>(c);
  pool_exp += n * std::max(0.0, 1.0 - covered);
  if (pool_exp > 0.0) close_cell(pool_obs, pool_exp);
  out.dof = std::max(cells - 1, 0);
  return out;
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> y_se) {
  if (x.size() != y.size() || x.size() != y_se.size() || x.size() < 2)
    throw InternalError("weighted_line_fit: need matching inputs of length >= 2");
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double w = y_se[k] > 0.0 ? 1.0 / (y_se[k] * y_se[k]) : 1.0;
    sw += w;
    sx += w * x[k];
    sy += w * y[k];
    sxx += w * x[k] * x[k];
    sxy += w * x[k] * y[k];
  }
  const double det = sw * sxx - sx * sx;
  LineFit fit;
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / sw;
  fit.slope_se = std::sqrt(sw / det);
  return fit;
}

}  // namespace taeblp
