#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oralab/error.hpp"
#include "oralab/rab_barriers.hpp"

using namespace oralab;

namespace {

RabData small_data(double horizon = 0.3) {
  const Grid g(-4.0, 5.0, 900);
  InjectionSchedule inj;
  inj.atoms = AtomList::single(0.0);
  inj.I = CumulativeSchedule::linear(1.0);
  return RabData{DensityGrid::uniform(g, 0.0, 1.0), inj, CumulativeSchedule::linear(1.0), horizon};
}

}  // namespace

TEST(RabData, EpsilonAndValidation) {
  RabData d = small_data();
  EXPECT_DOUBLE_EQ(d.epsilon0(), 1.0);
  d.validate();

  RabData heavy = d;
  heavy.injection.I = CumulativeSchedule::zero();
  heavy.J = CumulativeSchedule::linear(4.0);
  EXPECT_THROW(heavy.validate(), Error);  // 1 - 4 * 0.3 < 0

  RabData bad_mass = d;
  bad_mass.u0 = d.u0.scaled(2.0);
  EXPECT_THROW(bad_mass.validate(), Error);
}

TEST(RabBarriers, DefaultDeltaAndBound) {
  EXPECT_DOUBLE_EQ(default_delta(0.1), 1e-5);
  EXPECT_DOUBLE_EQ(default_delta(0.5), 1e-3);
  EXPECT_DOUBLE_EQ(default_delta(0.01), 1e-7);
  const RabData d = small_data();
  const double e = std::exp(-std::pow(0.2, 4.0) / (2.0 * 1e-3));
  EXPECT_DOUBLE_EQ(rab_gap_bound(d, 0.2, 1e-3, 0.25), 0.2 + e * 0.25);
}

TEST(RabBarriers, MassLedgerAndSandwich) {
  const RabData d = small_data();
  const double Delta = 0.2, delta = 2e-3;
  const BarrierRun run = solve_rab(d, Delta, delta);
  ASSERT_EQ(run.steps, 150u);
  ASSERT_EQ(run.times.size(), run.steps + 1);
  double slabs = 0.0;
  for (std::size_t n = 0; n <= run.steps; ++n) {
    const double t = run.times[n];
    slabs += run.error_slab_mass[n];
    EXPECT_NEAR(run.lower_mass[n], 1.0 + d.injection.I(t) - d.J(t), 1e-12);
    EXPECT_NEAR(run.upper_mass[n], 1.0 + d.injection.I(t) - d.J(t) + slabs, 1e-12);
    EXPECT_LE(run.measured_gap[n], run.gap_bound[n] + 1e-12);
  }
  for (const auto& s : run.snapshots) {
    EXPECT_TRUE(leq(s.lower, s.upper, 1e-12)) << s.t;
    EXPECT_TRUE(leq(s.upper, s.lower, rab_gap_bound(d, Delta, delta, s.t) + 1e-12)) << s.t;
  }
  EXPECT_NEAR(run.removal_lower.total_mass(), d.J(run.times.back()), 1e-12);
}

TEST(RabBarriers, LowerOnlyMatchesFullRun) {
  const RabData d = small_data(0.1);
  const BarrierRun full = solve_rab(d, 0.2, 2e-3);
  const BarrierRun low = solve_rab_lower(d, 2e-3);
  const auto& a = full.snapshots.back().lower;
  const auto& b = low.snapshots.back().lower;
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_DOUBLE_EQ(a[i], b[i]);
}

TEST(RabBarriers, StepOrderAndCutPlacement) {
  const RabData d = small_data();
  const double delta = 1e-3;
  const StepResult lo = rab_lower_step(d.u0, 1, d, delta);
  EXPECT_NEAR(lo.removed.total_mass(), delta, 1e-14);
  // the lower cut takes the rightmost mass
  EXPECT_GE(Slab::from_density(lo.removed).support().first,
            Slab::from_density(lo.kept).support().second - d.u0.grid().h());
  const StepResult up = rab_upper_step(d.u0, 1, d, 0.2, delta);
  EXPECT_NEAR(up.removed.total_mass(), delta, 1e-14);
  EXPECT_GT(up.error_slab_mass, 0.0);
  EXPECT_THROW(rab_lower_step(d.u0, 0, d, delta), Error);
}

TEST(RabBarriers, RejectsBadParameters) {
  const RabData d = small_data();
  try {
    solve_rab(d, 1.5, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DeltaTooLarge);
  }
  EXPECT_THROW(solve_rab(d, 0.2, 0.0), Error);
  BarrierOptions o;
  o.sub_steps = 0;
  EXPECT_THROW(solve_rab(d, 0.2, 1e-3, o), Error);
}

TEST(RabBarriers, SnapshotsAtRequestedTimes) {
  const RabData d = small_data(0.2);
  BarrierOptions o;
  o.snapshot_stride = 1000;
  o.snapshot_times = {0.05, 0.15};
  const BarrierRun run = solve_rab(d, 0.2, 1e-3, o);
  EXPECT_NEAR(run.at_time(0.05).t, 0.05, 1e-12);
  EXPECT_NEAR(run.at_time(0.15).t, 0.15, 1e-12);
  EXPECT_EQ(run.at_step(0).n, 0u);
  EXPECT_THROW(run.at_time(0.1), Error);
}
