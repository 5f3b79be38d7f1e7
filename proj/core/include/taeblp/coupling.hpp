#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "taeblp/lattice.hpp"
#include "taeblp/measures.hpp"
#include "taeblp/rate_index.hpp"
#include "taeblp/rng.hpp"

namespace taeblp {

inline constexpr int kMaxLayers = 4;

enum class Side : std::uint8_t {
  right,  ///< bricklayer at s builds on column s
  left,   ///< bricklayer at s builds on column s-1
};

/// One layered clock of a bricklayer side: `mask` has bit k set when layer k lays.
struct Channel {
  double rate = 0.0;
  unsigned mask = 0;
};

struct ChannelSet {
  std::array<Channel, kMaxLayers> channels{};
  int size = 0;
};

/// Basic coupling of one bricklayer side given each layer's marginal rate.
///
/// Layers are ranked by rate (ties broken by layer index). Channel m has rate
/// g_(m) - g_(m-1) and fires for every layer of rank >= m, so layer k lays at
/// total rate g_k.
ChannelSet layered_channels(std::span<const double> layer_rates);

/// Same construction from the increments at one site: right side uses f(omega),
/// left side f(-omega).
ChannelSet joint_site_channels(std::span<const int> layer_values, Side side,
                               const RateParams& params);

/// A fired layered clock after it was applied.
struct LayerEvent {
  int column = 0;
  unsigned mask = 0;
  int site = 0;
  Side side = Side::right;
  double time = 0.0;
};

enum class DiscrepancyMove : std::uint8_t {
  none,
  right,  ///< one discrepancy moves column -> column + 1 (upper layer alone)
  left,   ///< one discrepancy moves column + 1 -> column (lower layer alone)
};

/// Effect of an event on the discrepancies between layers `lower` <= `upper`.
DiscrepancyMove which_moves(const LayerEvent& event, int lower, int upper) noexcept;

/// n <= 4 configurations evolving in basic coupling on a shared volume.
///
/// With the theta boundary each layer has its own phantom rates
/// exp(theta_left[k]) and exp(-theta_right[k]); they are coupled through the
/// same layered channels as the bulk bricklayers. With equal thetas the
/// boundary events are joint.
class LayeredSystem {
 public:
  /// Empty theta vectors mean "use the volume's thetas for every layer".
  LayeredSystem(const VolumeSpec& spec, RateParams params, std::vector<IncrementField> layers,
                std::vector<double> theta_left = {}, std::vector<double> theta_right = {},
                bool ordered = true);

  int layers() const noexcept { return static_cast<int>(layers_.size()); }
  const IncrementField& layer(int k) const noexcept { return layers_[static_cast<std::size_t>(k)]; }
  const VolumeSpec& spec() const noexcept { return spec_; }
  double clock() const noexcept { return clock_; }
  std::uint64_t events() const noexcept { return events_; }
  double total_rate() const noexcept { return index_.total(); }
  double resummed_total() const noexcept { return index_.resummed_total(); }

  /// Channels of bricklayer s on one side in the current state.
  ChannelSet side_channels(int s, Side side) const;
  bool side_active(int s, Side side) const noexcept;

  /// Fire the next event if it happens no later than t_end; otherwise move the
  /// clock to t_end and return nothing.
  std::optional<LayerEvent> step(double t_end, Rng& rng);

  /// Sitewise ordering of consecutive layers on [ell, r].
  bool ordered_everywhere() const noexcept;

 private:
  std::size_t channel_base(int s, Side side) const noexcept {
    return (static_cast<std::size_t>(s - spec_.ell + 1) * 2 + (side == Side::left ? 1 : 0)) *
           layers_.size();
  }
  void refresh_side(int s, Side side);
  void check_site(int i, unsigned mask) const;

  VolumeSpec spec_;
  RateTable rates_;
  std::vector<IncrementField> layers_;
  std::vector<double> left_phantom_;
  std::vector<double> right_phantom_;
  bool ordered_;
  RateIndex index_;
  std::vector<unsigned> masks_;
  double clock_ = 0.0;
  std::uint64_t events_ = 0;
};

/// Labels of the discrepancies between an ordered pair, kept contiguous per site.
///
/// Site s in [ell, r] holds labels a_s..b_s with a_s = base + sum_{u<s} d_u.
/// The reservoir sites ell-1 and r+1 absorb and emit labels through the theta
/// boundary. Initially label 0 is the highest label at the anchor site.
class LabelIndex {
 public:
  LabelIndex(int ell, int r, std::span<const int> counts, std::int64_t base);
  static LabelIndex from_pair(const IncrementField& lower, const IncrementField& upper,
                              int anchor = 0);

  int ell() const noexcept { return ell_; }
  int r() const noexcept { return r_; }
  int count(int s) const noexcept { return counts_[static_cast<std::size_t>(s - ell_)]; }
  std::int64_t first_label(int s) const noexcept;  ///< a_s
  std::int64_t last_label(int s) const noexcept { return first_label(s) + count(s) - 1; }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t base() const noexcept { return base_; }

  /// Site carrying label m, or nothing once it left [ell, r].
  std::optional<int> position(std::int64_t m) const noexcept;

  /// Highest label of `column` moves to column + 1. Returns its label.
  std::int64_t move_right(int column);
  /// Lowest label of column + 1 moves to `column`. Returns its label.
  std::int64_t move_left(int column);

  /// Update after a background event; returns the moved label if any.
  std::optional<std::int64_t> apply(const LayerEvent& event, int lower, int upper);

  /// Counts equal upper - lower on every bulk site.
  bool consistent_with(const IncrementField& lower, const IncrementField& upper) const noexcept;

 private:
  void add(int s, int delta);
  std::int64_t prefix(int s) const noexcept;  ///< sum of counts on [ell, s)

  int ell_;
  int r_;
  std::vector<int> counts_;
  std::vector<std::int64_t> tree_;
  std::size_t top_bit_ = 1;
  std::int64_t base_;
  std::int64_t total_ = 0;
};

/// Two ordered layers (lower = layer 0, upper = layer 1) with labeled discrepancies.
class OrderedPair {
 public:
  OrderedPair(const VolumeSpec& spec, RateParams params, IncrementField lower,
              IncrementField upper, std::vector<double> theta_left = {},
              std::vector<double> theta_right = {});

  const LayeredSystem& system() const noexcept { return system_; }
  const LabelIndex& labels() const noexcept { return labels_; }
  const IncrementField& lower() const noexcept { return system_.layer(0); }
  const IncrementField& upper() const noexcept { return system_.layer(1); }

  struct Step {
    LayerEvent event;
    std::optional<std::int64_t> moved;
  };

  /// Next event no later than t_end, with the label bookkeeping applied.
  std::optional<Step> step(double t_end, Rng& rng);

 private:
  LayeredSystem system_;
  LabelIndex labels_;
};

}  // namespace taeblp
