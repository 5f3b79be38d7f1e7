#include "taeblp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "taeblp/errors.hpp"

namespace taeblp {

ChannelSet layered_channels(std::span<const double> layer_rates) {
  const int n = static_cast<int>(layer_rates.size());
  if (n < 1 || n > kMaxLayers) throw ConfigError("layered_channels: need 1..4 layers");
  std::array<int, kMaxLayers> order{};
  for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  // Insertion sort keeps ties in layer order.
  for (int i = 1; i < n; ++i) {
    const int key = order[static_cast<std::size_t>(i)];
    int j = i - 1;
    while (j >= 0 && layer_rates[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] >
                         layer_rates[static_cast<std::size_t>(key)]) {
      order[static_cast<std::size_t>(j + 1)] = order[static_cast<std::size_t>(j)];
      --j;
    }
    order[static_cast<std::size_t>(j + 1)] = key;
  }
  ChannelSet out;
  out.size = n;
  unsigned mask = 0;
  for (int k = 0; k < n; ++k) mask |= 1u << k;
  double previous = 0.0;
  for (int m = 0; m < n; ++m) {
    const int layer = order[static_cast<std::size_t>(m)];
    const double g = layer_rates[static_cast<std::size_t>(layer)];
    out.channels[static_cast<std::size_t>(m)] = Channel{g - previous, mask};
    previous = g;
    mask &= ~(1u << layer);
  }
  return out;
}

ChannelSet joint_site_channels(std::span<const int> layer_values, Side side,
                               const RateParams& params) {
  std::array<double, kMaxLayers> g{};
  const std::size_t n = layer_values.size();
  if (n < 1 || n > kMaxLayers) throw ConfigError("joint_site_channels: need 1..4 layers");
  for (std::size_t k = 0; k < n; ++k)
    g[k] = rate_f(side == Side::right ? layer_values[k] : -layer_values[k], params);
  return layered_channels(std::span<const double>(g.data(), n));
}

DiscrepancyMove which_moves(const LayerEvent& event, int lower, int upper) noexcept {
  const bool lo = (event.mask >> lower) & 1u;
  const bool up = (event.mask >> upper) & 1u;
  if (up && !lo) return DiscrepancyMove::right;
  if (lo && !up) return DiscrepancyMove::left;
  return DiscrepancyMove::none;
}

// ---------------------------------------------------------------------------

LayeredSystem::LayeredSystem(const VolumeSpec& spec, RateParams params,
                             std::vector<IncrementField> layers, std::vector<double> theta_left,
                             std::vector<double> theta_right, bool ordered)
    : spec_(spec), rates_(params, spec.omega_max), layers_(std::move(layers)), ordered_(ordered) {
  spec_.validate();
  const std::size_t n = layers_.size();
  if (n < 1 || n > static_cast<std::size_t>(kMaxLayers))
    throw ConfigError("LayeredSystem: need 1..4 layers");
  if (theta_left.empty()) theta_left.assign(n, spec_.theta_left);
  if (theta_right.empty()) theta_right.assign(n, spec_.theta_right);
  if (theta_left.size() != n || theta_right.size() != n)
    throw ConfigError("LayeredSystem: one boundary theta per layer");
  for (std::size_t k = 0; k < n; ++k) {
    if (layers_[k].ell() != spec_.ell || layers_[k].r() != spec_.r)
      throw ConfigError("LayeredSystem: layer window does not match the volume");
    if (ordered_ && k > 0 && (theta_left[k] < theta_left[k - 1] || theta_right[k] < theta_right[k - 1]))
      throw ConfigError("LayeredSystem: boundary thetas must be nondecreasing across ordered layers");
    left_phantom_.push_back(std::exp(theta_left[k]));
    right_phantom_.push_back(std::exp(-theta_right[k]));
  }
  clock_ = layers_[0].clock;
  for (const auto& f : layers_)
    if (f.clock != clock_) throw ConfigError("LayeredSystem: layer clocks differ");
  const unsigned all = (1u << n) - 1u;
  for (int i = spec_.ell; i <= spec_.r; ++i) check_site(i, all);

  const std::size_t sites = static_cast<std::size_t>(spec_.r - spec_.ell + 3);
  index_ = RateIndex(sites * 2 * n);
  masks_.assign(sites * 2 * n, 0u);
  for (int s = spec_.ell - 1; s <= spec_.r + 1; ++s) {
    refresh_side(s, Side::right);
    refresh_side(s, Side::left);
  }
  index_.rebuild();
}

bool LayeredSystem::side_active(int s, Side side) const noexcept {
  if (spec_.boundary == Boundary::theta) {
    return side == Side::right ? (s >= spec_.ell - 1 && s <= spec_.r)
                               : (s >= spec_.ell && s <= spec_.r + 1);
  }
  return side == Side::right ? (s >= spec_.ell && s <= spec_.r - 1)
                             : (s >= spec_.ell + 1 && s <= spec_.r);
}

ChannelSet LayeredSystem::side_channels(int s, Side side) const {
  const std::size_t n = layers_.size();
  std::array<double, kMaxLayers> g{};
  if (!side_active(s, side)) {
    ChannelSet none;
    none.size = static_cast<int>(n);
    return none;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (side == Side::right)
      g[k] = s == spec_.ell - 1 ? left_phantom_[k] : rates_.f(layers_[k].omega(s));
    else
      g[k] = s == spec_.r + 1 ? right_phantom_[k] : rates_.f(-layers_[k].omega(s));
  }
  return layered_channels(std::span<const double>(g.data(), n));
}

void LayeredSystem::refresh_side(int s, Side side) {
  if (s < spec_.ell - 1 || s > spec_.r + 1) return;
  const ChannelSet set = side_channels(s, side);
  const std::size_t base = channel_base(s, side);
  for (int m = 0; m < set.size; ++m) {
    const Channel& ch = set.channels[static_cast<std::size_t>(m)];
    index_.set(base + static_cast<std::size_t>(m), ch.rate);
    masks_[base + static_cast<std::size_t>(m)] = ch.mask;
  }
}

void LayeredSystem::check_site(int i, unsigned mask) const {
  if (!spec_.is_bulk_site(i)) return;
  const int n = layers();
  for (int k = 0; k < n; ++k) {
    if (!((mask >> k) & 1u)) continue;
    const int w = layers_[static_cast<std::size_t>(k)].omega(i);
    if (w > spec_.omega_max || w < -spec_.omega_max) throw BandViolation(i, w, clock_, k);
  }
  if (!ordered_) return;
  for (int k = 1; k < n; ++k) {
    if (layers_[static_cast<std::size_t>(k - 1)].omega(i) > layers_[static_cast<std::size_t>(k)].omega(i)) {
      std::ostringstream os;
      os << "layer order violated at site " << i << " between layers " << k - 1 << " and " << k
         << " at time " << clock_;
      throw InternalError(os.str());
    }
  }
}

bool LayeredSystem::ordered_everywhere() const noexcept {
  for (int i = spec_.ell; i <= spec_.r; ++i)
    for (int k = 1; k < layers(); ++k)
      if (layers_[static_cast<std::size_t>(k - 1)].omega(i) > layers_[static_cast<std::size_t>(k)].omega(i))
        return false;
  return true;
}

std::optional<LayerEvent> LayeredSystem::step(double t_end, Rng& rng) {
  const double total = index_.total();
  const double dt = total > 0.0 ? exponential(rng, total) : t_end - clock_ + 1.0;
  if (clock_ + dt > t_end) {
    clock_ = std::max(clock_, t_end);
    for (auto& f : layers_) f.clock = clock_;
    return std::nullopt;
  }
  clock_ += dt;
  const std::size_t ch = index_.find(uniform01(rng) * total);
  const std::size_t n = layers_.size();
  const std::size_t side_index = ch / n;
  LayerEvent ev;
  ev.site = static_cast<int>(side_index / 2) + spec_.ell - 1;
  ev.side = (side_index & 1u) ? Side::left : Side::right;
  ev.column = ev.side == Side::right ? ev.site : ev.site - 1;
  ev.mask = masks_[ch];
  ev.time = clock_;
  for (std::size_t k = 0; k < n; ++k) {
    layers_[k].clock = clock_;
    if ((ev.mask >> k) & 1u) layers_[k].apply_brick(ev.column);
  }
  check_site(ev.column, ev.mask);
  check_site(ev.column + 1, ev.mask);
  for (int s = ev.column; s <= ev.column + 1; ++s) {
    refresh_side(s, Side::right);
    refresh_side(s, Side::left);
  }
  ++events_;
  return ev;
}

// ---------------------------------------------------------------------------

LabelIndex::LabelIndex(int ell, int r, std::span<const int> counts, std::int64_t base)
    : ell_(ell), r_(r), counts_(static_cast<std::size_t>(r - ell + 1), 0), base_(base) {
  if (counts.size() != counts_.size()) throw ConfigError("LabelIndex: one count per bulk site");
  tree_.assign(counts_.size() + 1, 0);
  while (top_bit_ * 2 <= counts_.size()) top_bit_ *= 2;
  for (int s = ell; s <= r; ++s) {
    const int c = counts[static_cast<std::size_t>(s - ell)];
    if (c < 0) throw InternalError("LabelIndex: negative discrepancy count");
    add(s, c);
  }
}

LabelIndex LabelIndex::from_pair(const IncrementField& lower, const IncrementField& upper,
                                 int anchor) {
  std::vector<int> counts;
  for (int s = lower.ell(); s <= lower.r(); ++s) counts.push_back(upper.omega(s) - lower.omega(s));
  LabelIndex idx(lower.ell(), lower.r(), counts, 0);
  if (anchor < idx.ell_ || anchor > idx.r_ || idx.count(anchor) < 1)
    throw ConfigError("LabelIndex: anchor site carries no discrepancy");
  // Put label 0 on top of the anchor site.
  idx.base_ = -(idx.prefix(anchor) + idx.count(anchor) - 1);
  return idx;
}

void LabelIndex::add(int s, int delta) {
  counts_[static_cast<std::size_t>(s - ell_)] += delta;
  total_ += delta;
  for (std::size_t k = static_cast<std::size_t>(s - ell_) + 1; k < tree_.size(); k += k & (~k + 1))
    tree_[k] += delta;
}

std::int64_t LabelIndex::prefix(int s) const noexcept {
  std::int64_t sum = 0;
  for (std::size_t k = static_cast<std::size_t>(s - ell_); k > 0; k -= k & (~k + 1)) sum += tree_[k];
  return sum;
}

std::int64_t LabelIndex::first_label(int s) const noexcept { return base_ + prefix(s); }

std::optional<int> LabelIndex::position(std::int64_t m) const noexcept {
  std::int64_t rem = m - base_;
  if (rem < 0 || rem >= total_) return std::nullopt;
  std::size_t pos = 0;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next < tree_.size() && tree_[next] <= rem) {
      pos = next;
      rem -= tree_[next];
    }
  }
  return ell_ + static_cast<int>(pos);
}

std::int64_t LabelIndex::move_right(int column) {
  if (column == ell_ - 1) {
    base_ -= 1;
    add(ell_, 1);
    return base_;
  }
  if (column < ell_ || column > r_ || count(column) < 1) {
    std::ostringstream os;
    os << "LabelIndex: right move from site " << column << " without a discrepancy";
    throw InternalError(os.str());
  }
  const std::int64_t label = last_label(column);
  add(column, -1);
  if (column + 1 <= r_) add(column + 1, 1);
  return label;
}

std::int64_t LabelIndex::move_left(int column) {
  const int from = column + 1;
  if (from == r_ + 1) {
    const std::int64_t label = base_ + total_;
    add(r_, 1);
    return label;
  }
  if (from < ell_ || from > r_ || count(from) < 1) {
    std::ostringstream os;
    os << "LabelIndex: left move from site " << from << " without a discrepancy";
    throw InternalError(os.str());
  }
  const std::int64_t label = first_label(from);
  add(from, -1);
  if (column >= ell_)
    add(column, 1);
  else
    base_ += 1;
  return label;
}

std::optional<std::int64_t> LabelIndex::apply(const LayerEvent& event, int lower, int upper) {
  switch (which_moves(event, lower, upper)) {
    case DiscrepancyMove::right:
      return move_right(event.column);
    case DiscrepancyMove::left:
      return move_left(event.column);
    case DiscrepancyMove::none:
      break;
  }
  return std::nullopt;
}

bool LabelIndex::consistent_with(const IncrementField& lower,
                                 const IncrementField& upper) const noexcept {
  for (int s = ell_; s <= r_; ++s)
    if (count(s) != upper.omega(s) - lower.omega(s)) return false;
  return true;
}

// ---------------------------------------------------------------------------

OrderedPair::OrderedPair(const VolumeSpec& spec, RateParams params, IncrementField lower,
                         IncrementField upper, std::vector<double> theta_left,
                         std::vector<double> theta_right)
    : system_(spec, params, {lower, upper}, std::move(theta_left), std::move(theta_right), true),
      labels_(LabelIndex::from_pair(lower, upper, 0)) {}

std::optional<OrderedPair::Step> OrderedPair::step(double t_end, Rng& rng) {
  const auto ev = system_.step(t_end, rng);
  if (!ev) return std::nullopt;
  return Step{*ev, labels_.apply(*ev, 0, 1)};
}

}  // namespace taeblp
