#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "taeblp/measures.hpp"
#include "taeblp/rate_index.hpp"
#include "taeblp/rng.hpp"

namespace taeblp {

inline constexpr int kDefaultOmegaMax = 40;

enum class Boundary {
  frozen,  ///< only columns [ell, r-1] grow
  theta,   ///< columns [ell-1, r] grow, with constant boundary rates
};

/// Finite volume [ell, r] plus its boundary variant.
///
/// Increments live on sites [ell-1, r+1], heights on columns [ell-2, r+1].
/// The theta variant uses exp(theta_left) for the phantom right action of the
/// bricklayer at ell-1 and exp(-theta_right) for the phantom left action of the
/// bricklayer at r+1. Most callers use theta_left == theta_right.
struct VolumeSpec {
  int ell = -20;
  int r = 20;
  Boundary boundary = Boundary::theta;
  double theta_left = 0.0;
  double theta_right = 0.0;
  int omega_max = kDefaultOmegaMax;

  /// Throws ConfigError unless ell < 0 < r and omega_max >= 1.
  void validate() const;

  int first_site() const noexcept { return ell - 1; }
  int last_site() const noexcept { return r + 1; }
  int first_column() const noexcept { return ell - 2; }
  int last_column() const noexcept { return r + 1; }
  int first_growth_column() const noexcept { return boundary == Boundary::theta ? ell - 1 : ell; }
  int last_growth_column() const noexcept { return boundary == Boundary::theta ? r : r - 1; }
  bool is_growth_column(int c) const noexcept {
    return c >= first_growth_column() && c <= last_growth_column();
  }
  /// Sites whose increments feed rates and are held to the band.
  bool is_bulk_site(int i) const noexcept { return i >= ell && i <= r; }
};

/// Increments and heights over a finite window plus the simulation clock.
class IncrementField {
 public:
  IncrementField() = default;
  IncrementField(int ell, int r);

  int ell() const noexcept { return ell_; }
  int r() const noexcept { return r_; }
  int first_site() const noexcept { return ell_ - 1; }
  int last_site() const noexcept { return r_ + 1; }

  int omega(int i) const noexcept { return omega_[static_cast<std::size_t>(i - ell_ + 1)]; }
  void set_omega(int i, int value) noexcept {
    omega_[static_cast<std::size_t>(i - ell_ + 1)] = value;
  }
  std::int64_t height(int c) const noexcept {
    return height_[static_cast<std::size_t>(c - ell_ + 2)];
  }
  void set_height(int c, std::int64_t value) noexcept {
    height_[static_cast<std::size_t>(c - ell_ + 2)] = value;
  }
  std::span<const int> omegas() const noexcept { return omega_; }

  double clock = 0.0;

  /// Brick on column c: omega_c -= 1, omega_{c+1} += 1, h_c += 1.
  void apply_brick(int c) noexcept {
    const auto k = static_cast<std::size_t>(c - ell_ + 1);
    omega_[k] -= 1;
    omega_[k + 1] += 1;
    height_[k + 1] += 1;
  }

  /// Integrate heights from the increments with h_0 = 0.
  void reset_heights();

  /// True when omega_i = h_{i-1} - h_i on every site of the window.
  bool gradient_consistent() const noexcept;

  /// Sum of omega over [first, last].
  std::int64_t omega_sum(int first, int last) const noexcept;

  bool operator==(const IncrementField&) const = default;

 private:
  int ell_ = 0;
  int r_ = 0;
  std::vector<int> omega_;
  std::vector<std::int64_t> height_;
};

/// Stationary product start: omega_i iid from `marginal` on every site.
IncrementField init_stationary(const StationaryMarginal& marginal, const VolumeSpec& spec,
                               Rng& rng);
IncrementField init_stationary(double theta, const VolumeSpec& spec, const RateParams& params,
                               Rng& rng);

/// Debug dump: header `# taeblp-snapshot theta=.. beta=.. clock=.. seed=..`,
/// then one `i omega_i h_i` line per site.
struct Snapshot {
  IncrementField field;
  double theta = 0.0;
  double beta = 1.0;
  std::uint64_t seed = 0;
};
void write_snapshot(std::ostream& os, const Snapshot& snap);
Snapshot read_snapshot(std::istream& is);

/// Tabulated f(z) and f(-z) for |z| <= omega_max + 1.
class RateTable {
 public:
  RateTable(RateParams params, int omega_max);
  double f(int z) const noexcept { return table_[static_cast<std::size_t>(z + offset_)]; }
  int omega_max() const noexcept { return omega_max_; }
  double beta() const noexcept { return beta_; }

 private:
  double beta_;
  int omega_max_;
  int offset_;
  std::vector<double> table_;
};

/// Exact event-driven simulation of one process on a finite volume.
class SingleProcess {
 public:
  SingleProcess(const VolumeSpec& spec, RateParams params, IncrementField field);

  const VolumeSpec& spec() const noexcept { return spec_; }
  const IncrementField& field() const noexcept { return field_; }
  std::uint64_t events() const noexcept { return events_; }

  /// Total growth rate of column c in the current state.
  double column_rate(int c) const;
  double total_rate() const noexcept { return index_.total(); }
  double resummed_total() const noexcept { return index_.resummed_total(); }

  /// Advance to t_end. Returns the number of bricks laid.
  std::uint64_t run_until(double t_end, Rng& rng);

 private:
  void refresh_column(int c);
  void check_band(int i) const;

  VolumeSpec spec_;
  RateTable rates_;
  IncrementField field_;
  RateIndex index_;
  double left_phantom_;
  double right_phantom_;
  std::uint64_t events_ = 0;
};

}  // namespace taeblp
