#include <gtest/gtest.h>

#include <cmath>

#include "taeblp/convexity.hpp"
#include "taeblp/errors.hpp"

using namespace taeblp;

namespace {

const RateParams kB1(1.0);

LabelProcess make_process(double lam, double rho, int half, std::uint64_t seed, Rng& bg) {
  const OrderedPairSampler plain(lam, rho, kB1, false);
  const OrderedPairSampler strict(lam, rho, kB1, true);
  const double tl = plain.lower().theta();
  const double tr = plain.upper().theta();
  VolumeSpec spec;
  spec.ell = -half;
  spec.r = half;
  spec.boundary = Boundary::theta;
  spec.theta_left = spec.theta_right = tr;
  bg = make_stream(seed, 0);
  IncrementField lower(-half, half);
  IncrementField upper(-half, half);
  for (int s = -half - 1; s <= half + 1; ++s) {
    const auto [e, o] = s == 0 ? strict(bg) : plain(bg);
    lower.set_omega(s, e);
    upper.set_omega(s, o);
  }
  lower.reset_heights();
  upper.reset_heights();
  return LabelProcess(OrderedPair(spec, kB1, lower, upper, {tl, tr}, {tl, tr}), RefreshTable(1.0));
}

}  // namespace

// Frozen values from an independent 30-digit evaluation.
TEST(RefreshTable, FrozenValues) {
  const RefreshTable t(1.0);
  EXPECT_NEAR(t.p(2), 0.7310585786300049, 1e-15);
  EXPECT_NEAR(t.q(2), 0.2689414213699951, 1e-15);
  EXPECT_NEAR(t.joint(2)[2], 0.46211715726000976, 1e-15);
  EXPECT_NEAR(t.p(3), 0.6652409557748219, 1e-15);
  EXPECT_NEAR(t.q(3), 0.09003057317038046, 1e-15);
  EXPECT_NEAR(t.y_law(3)[1], 0.2447284710547977, 1e-15);
  EXPECT_NEAR(t.joint(3)[2], 0.3304819115496438, 1e-15);
  EXPECT_EQ(t.p(1), 1.0);
  EXPECT_THROW(t.p(0), InternalError);
}

TEST(RefreshTable, LargeDStaysFinite) {
  const RefreshTable t(2.0);
  EXPECT_NEAR(t.p(5000), -std::expm1(-2.0), 1e-15);
  EXPECT_EQ(t.q(5000), 0.0);
}

TEST(RefreshTable, JointLinesSumToOne) {
  for (double beta : {0.1, 1.0, 3.0}) {
    const RefreshTable t(beta);
    for (int d = 1; d <= 40; ++d) {
      double sum = 0.0;
      for (double m : t.joint(d)) {
        EXPECT_GE(m, 0.0);
        sum += m;
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
    }
  }
}

TEST(Refresh, DrawFrequencies) {
  const RefreshTable t(1.0);
  Rng rng = make_stream(17, 0);
  const int n = 200000;
  std::array<int, 6> counts{};
  for (int k = 0; k < n; ++k) {
    const auto [y, z] = refresh_joint(10, 12, 3, t, rng);
    ASSERT_GE(y, z);
    if (y == 10 && z == 10) ++counts[0];
    else if (y == 11 && z == 10) ++counts[1];
    else if (y == 12 && z == 10) ++counts[2];
    else if (y == 11 && z == 11) ++counts[3];
    else if (y == 12 && z == 11) ++counts[4];
    else if (y == 12 && z == 12) ++counts[5];
    else FAIL() << "unexpected outcome " << y << "," << z;
  }
  const auto law = t.joint(3);
  for (std::size_t k = 0; k < 6; ++k) {
    const double se = std::sqrt(law[k] * (1 - law[k]) / n);
    EXPECT_NEAR(counts[k] / double(n), law[k], 5 * se + 1e-12);
  }
  int at_b = 0;
  for (int k = 0; k < n; ++k) at_b += refresh_y(0, 3, 4, t, rng) == 3 ? 1 : 0;
  EXPECT_NEAR(at_b / double(n), t.p(4), 5 * std::sqrt(t.p(4) * (1 - t.p(4)) / n));
}

TEST(Refresh, SingleLabelConsumesNoRandomness) {
  const RefreshTable t(1.0);
  Rng rng = make_stream(2, 0);
  const Rng before = rng;
  EXPECT_EQ(refresh_y(5, 5, 1, t, rng), 5);
  EXPECT_EQ(refresh_z(5, 5, 1, t, rng), 5);
  EXPECT_EQ(refresh_joint(5, 5, 1, t, rng), std::make_pair(std::int64_t{5}, std::int64_t{5}));
  EXPECT_EQ(rng, before);
}

TEST(OnBackgroundEvent, MovedLabelsAreRefreshedJointly) {
  const RefreshTable t(1.0);
  Rng rng = make_stream(3, 0);
  const std::vector<int> counts{0, 0, 3, 0, 0};
  LabelIndex idx(-2, 2, counts, 0);  // labels 0, 1, 2 at site 0
  LayerEvent ev;
  ev.column = 0;
  ev.mask = 0b10;
  EXPECT_EQ(idx.move_right(0), 2);
  LabelPair pair{2, 2, 0, 2, 0, 2};
  const RefreshOutcome out = on_background_event(ev, idx, 0, 0, pair, t, rng);
  EXPECT_TRUE(out.joint);
  EXPECT_EQ(pair.y, 2);
  EXPECT_EQ(pair.z, 2);
  EXPECT_EQ(pair.a_y, 2);
  EXPECT_EQ(pair.b_y, 2);
}

TEST(OnBackgroundEvent, DistantEventsLeaveLabels) {
  const RefreshTable t(1.0);
  Rng rng = make_stream(3, 1);
  const std::vector<int> counts{0, 0, 3, 0, 0};
  const LabelIndex idx(-2, 2, counts, 0);
  LayerEvent ev;
  ev.column = 2;
  ev.mask = 0b11;
  LabelPair pair{1, 0, 0, 2, 0, 2};
  const RefreshOutcome out = on_background_event(ev, idx, 0, 0, pair, t, rng);
  EXPECT_FALSE(out.y_refreshed || out.z_refreshed);
  EXPECT_EQ(pair.y, 1);
  EXPECT_EQ(pair.z, 0);
}

TEST(OnBackgroundEvent, TriggerModes) {
  const RefreshTable t(1.0);
  const std::vector<int> counts{0, 0, 3, 0, 0};
  const LabelIndex idx(-2, 2, counts, 0);
  LayerEvent ev;
  ev.column = -1;  // touches sites -1 and 0
  ev.mask = 0b11;  // joint move: no discrepancy changes
  Rng rng = make_stream(3, 2);
  LabelPair pair{1, 0, 0, 2, 0, 2};
  auto out = on_background_event(ev, idx, 0, 0, pair, t, rng, RefreshTrigger::discrepancy_change);
  EXPECT_FALSE(out.y_refreshed);
  out = on_background_event(ev, idx, 0, 0, pair, t, rng, RefreshTrigger::any_change);
  EXPECT_TRUE(out.joint);
  EXPECT_GE(pair.y, pair.z);
}

TEST(OnBackgroundEvent, ExitIsReported) {
  const RefreshTable t(1.0);
  Rng rng = make_stream(3, 3);
  const std::vector<int> counts{0, 0, 0, 0, 2};
  LabelIndex idx(-2, 2, counts, 0);  // labels 0, 1 at site 2
  LayerEvent ev;
  ev.column = 2;
  ev.mask = 0b10;
  EXPECT_EQ(idx.move_right(2), 1);
  LabelPair pair{1, 0, 0, 1, 0, 1};
  EXPECT_TRUE(on_background_event(ev, idx, 2, 2, pair, t, rng).exited);
}

TEST(LabelProcess, OrderAndSandwichAlongPaths) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng bg;
    LabelProcess proc = make_process(0.3, 1.2, 25, seed, bg);
    Rng lab = make_stream(seed, 0, 1);
    proc.refresh_at_start(lab);
    EXPECT_EQ(proc.refreshes(), 2u);
    while (proc.step(1.0, bg, lab)) {
      ASSERT_FALSE(proc.exited());
      ASSERT_GE(proc.pair().y, proc.pair().z);
      ASSERT_TRUE(sandwich_holds(proc, derived_views(proc)));
    }
    EXPECT_EQ(proc.violations(), 0u);
    EXPECT_THROW(proc.refresh_at_start(lab), InternalError);
  }
}

TEST(LabelProcess, StartsOnTopLabelOfSiteZero) {
  Rng bg;
  const LabelProcess proc = make_process(0.0, 0.5, 10, 4, bg);
  EXPECT_EQ(proc.pair().y, 0);
  EXPECT_EQ(proc.pair().z, 0);
  EXPECT_EQ(proc.q_site(), 0);
  EXPECT_EQ(proc.pair().b_y, 0);
}
