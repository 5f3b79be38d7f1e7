#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "taeblp/coupling.hpp"
#include "taeblp/lattice.hpp"
#include "taeblp/rng.hpp"

namespace taeblp {

/// Refresh probabilities p(d), q(d) for d = omega - eta discrepancies on a site.
///
///   p(d) = (1 - e^{-beta}) / (1 - e^{-beta d}),  q(d) = (e^beta - 1) / (e^{beta d} - 1).
///
/// `p_perturbation` is a test hook added to p(d) for d >= 2; leave it at zero.
class RefreshTable {
 public:
  explicit RefreshTable(double beta, double p_perturbation = 0.0);

  double beta() const noexcept { return beta_; }
  double p(std::int64_t d) const;
  double q(std::int64_t d) const;

  /// Law of y over (a, b-1, b).
  std::array<double, 3> y_law(std::int64_t d) const;
  /// Law of z over (a, a+1, b).
  std::array<double, 3> z_law(std::int64_t d) const;
  /// Six joint lines over (a,a), (b-1,a), (b,a), (b-1,a+1), (b,a+1), (b,b).
  std::array<double, 6> joint(std::int64_t d) const;

 private:
  double beta_;
  double perturbation_;
};

std::int64_t refresh_y(std::int64_t a, std::int64_t b, std::int64_t d, const RefreshTable& table,
                       Rng& rng);
std::int64_t refresh_z(std::int64_t a, std::int64_t b, std::int64_t d, const RefreshTable& table,
                       Rng& rng);
/// Joint refresh of (y, z) inside one partition interval; always y >= z.
std::pair<std::int64_t, std::int64_t> refresh_joint(std::int64_t a, std::int64_t b, std::int64_t d,
                                                    const RefreshTable& table, Rng& rng);

enum class RefreshTrigger {
  any_change,          ///< every event touching the label's site
  discrepancy_change,  ///< only events that change omega - eta there
};

/// The two tagged labels and the partition intervals of their sites.
struct LabelPair {
  std::int64_t y = 0;
  std::int64_t z = 0;
  std::int64_t a_y = 0;
  std::int64_t b_y = 0;
  std::int64_t a_z = 0;
  std::int64_t b_z = 0;
};

struct RefreshOutcome {
  bool y_refreshed = false;
  bool z_refreshed = false;
  bool joint = false;
  bool exited = false;  ///< a tagged label left the volume
};

/// Label update after one background event.
///
/// `labels` is the index after the event; `y_site` and `z_site` are the sites of
/// the tagged labels before it. Refreshes use the post-event intervals.
RefreshOutcome on_background_event(const LayerEvent& event, const LabelIndex& labels, int y_site,
                                   int z_site, LabelPair& pair, const RefreshTable& table,
                                   Rng& rng, RefreshTrigger trigger = RefreshTrigger::any_change);

/// Background pair (eta, omega) with the tagged labels y, z riding on it.
class LabelProcess {
 public:
  LabelProcess(OrderedPair background, RefreshTable table,
               RefreshTrigger trigger = RefreshTrigger::any_change);

  const OrderedPair& background() const noexcept { return background_; }
  const LabelPair& pair() const noexcept { return pair_; }
  const RefreshTable& table() const noexcept { return table_; }

  /// Q = X_y and Q_eta = X_z; empty once the label left the volume.
  std::optional<int> q_site() const noexcept { return background_.labels().position(pair_.y); }
  std::optional<int> q_eta_site() const noexcept { return background_.labels().position(pair_.z); }

  bool exited() const noexcept { return exited_; }
  std::uint64_t violations() const noexcept { return violations_; }
  std::uint64_t refreshes() const noexcept { return refreshes_; }
  std::uint64_t joint_refreshes() const noexcept { return joint_refreshes_; }

  /// Joint refresh of (y, z) on their common starting site before any event.
  /// Without it the tagged labels start on the top label of site 0, which
  /// biases the first move of Q to the right whenever that site carries more
  /// than one discrepancy.
  void refresh_at_start(Rng& labels);

  /// One background event (if any before t_end) plus the label update.
  /// `bg` drives the background, `labels` the refresh draws.
  std::optional<LayerEvent> step(double t_end, Rng& bg, Rng& labels);

 private:
  OrderedPair background_;
  RefreshTable table_;
  RefreshTrigger trigger_;
  LabelPair pair_;
  bool exited_ = false;
  std::uint64_t violations_ = 0;
  std::uint64_t refreshes_ = 0;
  std::uint64_t joint_refreshes_ = 0;
};

/// omega^- = omega - delta_Q and eta^+ = eta + delta_{Q_eta}.
struct DerivedViews {
  IncrementField omega_minus;
  IncrementField eta_plus;
  int q = 0;
  int q_eta = 0;
};
DerivedViews derived_views(const LabelProcess& process);

/// eta <= eta^+ <= omega and eta <= omega^- <= omega on every bulk site.
bool sandwich_holds(const LabelProcess& process, const DerivedViews& views) noexcept;

}  // namespace taeblp
