#include "taeblp/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "taeblp/errors.hpp"

namespace taeblp {

RefreshTable::RefreshTable(double beta, double p_perturbation)
    : beta_(RateParams(beta).beta), perturbation_(p_perturbation) {}

double RefreshTable::p(std::int64_t d) const {
  if (d < 1) throw InternalError("refresh table needs d >= 1");
  if (d == 1) return 1.0;
  const double bd = beta_ * static_cast<double>(d);
  return -std::expm1(-beta_) / -std::expm1(-bd) + perturbation_;
}

double RefreshTable::q(std::int64_t d) const {
  if (d < 1) throw InternalError("refresh table needs d >= 1");
  if (d == 1) return 1.0;
  const double bd = beta_ * static_cast<double>(d);
  // (e^beta - 1) / (e^{beta d} - 1) without overflow for large d.
  return std::expm1(beta_) * std::exp(-bd) / -std::expm1(-bd);
}

std::array<double, 3> RefreshTable::y_law(std::int64_t d) const {
  if (d == 1) return {1.0, 0.0, 0.0};
  const double pp = p(d);
  const double qq = q(d);
  return {qq, std::max(1.0 - pp - qq, 0.0), pp};
}

std::array<double, 3> RefreshTable::z_law(std::int64_t d) const {
  if (d == 1) return {1.0, 0.0, 0.0};
  const double pp = p(d);
  const double qq = q(d);
  return {pp, std::max(1.0 - pp - qq, 0.0), qq};
}

std::array<double, 6> RefreshTable::joint(std::int64_t d) const {
  if (d == 1) return {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const double pp = p(d);
  const double qq = q(d);
  const double side = std::max(std::min(pp - qq, 1.0 - pp - qq), 0.0);
  return {qq, side, std::max(2.0 * pp - 1.0, 0.0), std::max(1.0 - 2.0 * pp, 0.0), side, qq};
}

namespace {

template <std::size_t N>
std::size_t pick(const std::array<double, N>& masses, double u) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < N; ++k) {
    acc += masses[k];
    if (u < acc) return k;
  }
  // Skip trailing empty lines so rounding never selects a zero-mass outcome.
  std::size_t last = N - 1;
  while (last > 0 && masses[last] <= 0.0) --last;
  return last;
}

}  // namespace

std::int64_t refresh_y(std::int64_t a, std::int64_t b, std::int64_t d, const RefreshTable& table,
                       Rng& rng) {
  if (d == 1) return a;
  switch (pick(table.y_law(d), uniform01(rng))) {
    case 0: return a;
    case 1: return b - 1;
    default: return b;
  }
}

std::int64_t refresh_z(std::int64_t a, std::int64_t b, std::int64_t d, const RefreshTable& table,
                       Rng& rng) {
  if (d == 1) return a;
  switch (pick(table.z_law(d), uniform01(rng))) {
    case 0: return a;
    case 1: return a + 1;
    default: return b;
  }
}

std::pair<std::int64_t, std::int64_t> refresh_joint(std::int64_t a, std::int64_t b, std::int64_t d,
                                                    const RefreshTable& table, Rng& rng) {
  if (d == 1) return {a, a};
  switch (pick(table.joint(d), uniform01(rng))) {
    case 0: return {a, a};
    case 1: return {b - 1, a};
    case 2: return {b, a};
    case 3: return {b - 1, a + 1};
    case 4: return {b, a + 1};
    default: return {b, b};
  }
}

// ---------------------------------------------------------------------------

RefreshOutcome on_background_event(const LayerEvent& event, const LabelIndex& labels, int y_site,
                                   int z_site, LabelPair& pair, const RefreshTable& table,
                                   Rng& rng, RefreshTrigger trigger) {
  RefreshOutcome out;
  const bool changes_d = which_moves(event, 0, 1) != DiscrepancyMove::none;
  const auto touched = [&](int site) {
    if (site != event.column && site != event.column + 1) return false;
    return trigger == RefreshTrigger::any_change || changes_d;
  };
  const bool y_in = touched(y_site);
  const bool z_in = touched(z_site);
  const auto y_after = labels.position(pair.y);
  const auto z_after = labels.position(pair.z);
  if (!y_after || !z_after) {
    out.exited = true;
    return out;
  }
  if (!y_in && !z_in) return out;

  const auto interval = [&](int s) {
    const std::int64_t a = labels.first_label(s);
    const std::int64_t d = labels.count(s);
    return std::pair<std::int64_t, std::int64_t>{a, d};
  };

  if (y_in && z_in && *y_after == *z_after) {
    const auto [a, d] = interval(*y_after);
    const auto [y, z] = refresh_joint(a, a + d - 1, d, table, rng);
    pair.y = y;
    pair.z = z;
    out.y_refreshed = out.z_refreshed = out.joint = true;
  } else {
    if (y_in) {
      const auto [a, d] = interval(*y_after);
      pair.y = refresh_y(a, a + d - 1, d, table, rng);
      out.y_refreshed = true;
    }
    if (z_in) {
      const auto [a, d] = interval(*z_after);
      pair.z = refresh_z(a, a + d - 1, d, table, rng);
      out.z_refreshed = true;
    }
  }
  const auto ys = labels.position(pair.y);
  const auto zs = labels.position(pair.z);
  pair.a_y = labels.first_label(*ys);
  pair.b_y = labels.last_label(*ys);
  pair.a_z = labels.first_label(*zs);
  pair.b_z = labels.last_label(*zs);
  return out;
}

// ---------------------------------------------------------------------------

LabelProcess::LabelProcess(OrderedPair background, RefreshTable table, RefreshTrigger trigger)
    : background_(std::move(background)), table_(table), trigger_(trigger) {
  const LabelIndex& idx = background_.labels();
  const auto s = idx.position(0);
  if (!s) throw ConfigError("LabelProcess: label 0 is not in the volume");
  pair_.a_y = pair_.a_z = idx.first_label(*s);
  pair_.b_y = pair_.b_z = idx.last_label(*s);
}

void LabelProcess::refresh_at_start(Rng& labels) {
  if (background_.system().events() != 0 || refreshes_ != 0)
    throw InternalError("LabelProcess: the starting refresh must come before any event");
  const LabelIndex& idx = background_.labels();
  const int s = *idx.position(0);
  const std::int64_t a = idx.first_label(s);
  const std::int64_t d = idx.count(s);
  const auto [y, z] = refresh_joint(a, a + d - 1, d, table_, labels);
  pair_.y = y;
  pair_.z = z;
  refreshes_ += 2;
  joint_refreshes_ += 1;
}

std::optional<LayerEvent> LabelProcess::step(double t_end, Rng& bg, Rng& labels) {
  if (exited_) throw InternalError("LabelProcess: stepping after a tagged label left");
  const LabelIndex& idx = background_.labels();
  const auto y_before = idx.position(pair_.y);
  const auto z_before = idx.position(pair_.z);
  const auto st = background_.step(t_end, bg);
  if (!st) return std::nullopt;
  const RefreshOutcome out = on_background_event(st->event, background_.labels(), *y_before,
                                                 *z_before, pair_, table_, labels, trigger_);
  if (out.exited) {
    exited_ = true;
    return st->event;
  }
  refreshes_ += static_cast<std::uint64_t>(out.y_refreshed) + static_cast<std::uint64_t>(out.z_refreshed);
  joint_refreshes_ += static_cast<std::uint64_t>(out.joint);
  if (pair_.y < pair_.z) ++violations_;
  return st->event;
}

// ---------------------------------------------------------------------------

DerivedViews derived_views(const LabelProcess& process) {
  const auto q = process.q_site();
  const auto qe = process.q_eta_site();
  if (!q || !qe) throw InternalError("derived_views: a tagged label left the volume");
  DerivedViews v{process.background().upper(), process.background().lower(), *q, *qe};
  v.omega_minus.set_omega(*q, v.omega_minus.omega(*q) - 1);
  v.eta_plus.set_omega(*qe, v.eta_plus.omega(*qe) + 1);
  return v;
}

bool sandwich_holds(const LabelProcess& process, const DerivedViews& views) noexcept {
  const IncrementField& eta = process.background().lower();
  const IncrementField& omega = process.background().upper();
  for (int i = eta.ell(); i <= eta.r(); ++i) {
    const int e = eta.omega(i);
    const int w = omega.omega(i);
    const int wm = views.omega_minus.omega(i);
    const int ep = views.eta_plus.omega(i);
    if (!(e <= ep && ep <= w && e <= wm && wm <= w)) return false;
  }
  return true;
}

}  // namespace taeblp
