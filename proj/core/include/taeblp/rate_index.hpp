#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace taeblp {

/// Fenwick-indexed table of nonnegative channel rates.
///
/// Supports O(log n) point updates and O(log n) selection of a channel with
/// probability proportional to its rate. The running total is rebuilt from
/// scratch every `kResumInterval` updates so rounding drift stays bounded.
class RateIndex {
 public:
  static constexpr std::uint64_t kResumInterval = 100000;

  RateIndex() = default;
  explicit RateIndex(std::size_t n) : rates_(n, 0.0), tree_(n + 1, 0.0) {
    top_bit_ = 1;
    while (top_bit_ * 2 <= n) top_bit_ *= 2;
  }

  std::size_t size() const noexcept { return rates_.size(); }
  double rate(std::size_t i) const noexcept { return rates_[i]; }
  double total() const noexcept { return total_; }

  void set(std::size_t i, double rate) noexcept {
    const double delta = rate - rates_[i];
    if (delta == 0.0) return;
    rates_[i] = rate;
    for (std::size_t k = i + 1; k <= rates_.size(); k += k & (~k + 1)) tree_[k] += delta;
    total_ += delta;
    if (++updates_ >= kResumInterval) rebuild();
  }

  /// Recompute the tree and total from the stored rates.
  void rebuild() noexcept {
    const std::size_t n = rates_.size();
    for (std::size_t k = 1; k <= n; ++k) tree_[k] = rates_[k - 1];
    for (std::size_t k = 1; k <= n; ++k) {
      const std::size_t parent = k + (k & (~k + 1));
      if (parent <= n) tree_[parent] += tree_[k];
    }
    double sum = 0.0;
    for (double r : rates_) sum += r;
    total_ = sum;
    updates_ = 0;
  }

  /// Channel i with prefix(i) <= target < prefix(i + 1), for target in [0, total).
  std::size_t find(double target) const noexcept {
    std::size_t pos = 0;
    double rem = target;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= rates_.size() && tree_[next] <= rem) {
        pos = next;
        rem -= tree_[next];
      }
    }
    // Rounding can land past the end or on an empty channel.
    if (pos >= rates_.size() || rates_[pos] <= 0.0) return nearest_positive(pos);
    return pos;
  }

  /// Sum of all rates computed directly (for drift checks).
  double resummed_total() const noexcept {
    double sum = 0.0;
    for (double r : rates_) sum += r;
    return sum;
  }

 private:
  std::size_t nearest_positive(std::size_t pos) const noexcept {
    const std::size_t n = rates_.size();
    for (std::size_t k = pos < n ? pos : n; k-- > 0;)
      if (rates_[k] > 0.0) return k;
    for (std::size_t k = pos; k < n; ++k)
      if (rates_[k] > 0.0) return k;
    return 0;
  }

  std::vector<double> rates_;
  std::vector<double> tree_;
  std::size_t top_bit_ = 1;
  double total_ = 0.0;
  std::uint64_t updates_ = 0;
};

}  // namespace taeblp
