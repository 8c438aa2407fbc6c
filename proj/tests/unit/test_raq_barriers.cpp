#include <gtest/gtest.h>

#include <cmath>

#include "oralab/error.hpp"
#include "oralab/raq_barriers.hpp"

using namespace oralab;

namespace {

RaqData small_data(double Q = 0.5, double horizon = 0.3) {
  const Grid g(-4.0, 5.0, 900);
  return RaqData{DensityGrid::uniform(g, 0.0, 1.0), QuantileSchedule::constant_fraction(Q),
                 horizon};
}

}  // namespace

TEST(RaqBarriers, BoundAndWindow) {
  const double e = std::exp(-std::pow(0.1, 4.0) / (2.0 * 1e-3));
  EXPECT_DOUBLE_EQ(raq_gap_bound(0.1, 1e-3, 200), 0.3 + e * 0.2 + e);
  // e = exp(-0.05) is close to 1 here, so nothing is certified
  EXPECT_FALSE(raq_step_certified(0.1, 1e-3, 1));
  EXPECT_TRUE(raq_step_certified(0.2, 1e-4, 1000));
  EXPECT_FALSE(raq_step_certified(0.2, 1e-4, 4000));
  const RaqData d = small_data();
  const auto [lo, hi] = q_bounds(d, 2, 0.1);
  EXPECT_DOUBLE_EQ(lo, 0.5 * (1.0 - 0.2));
  EXPECT_DOUBLE_EQ(hi, 0.5 * (1.0 - 0.1));
  EXPECT_THROW(q_bounds(d, 20, 0.1), Error);
}

TEST(RaqBarriers, MirroredData) {
  const Grid g(-2.0, 2.0, 40);
  const RaqData d{DensityGrid::uniform(g, 0.0, 1.0), QuantileSchedule::constant_fraction(0.25),
                  0.4};
  const RaqData m = d.mirrored();
  EXPECT_NEAR(m.u0.mass_between(-1.0, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(m.q.q(0.2), 0.8 - 0.25 * 0.8, 1e-15);
}

TEST(RaqBarriers, MassLedgerAndSandwich) {
  const RaqData d = small_data(0.5, 0.2);
  const double Delta = 0.2, delta = 1e-4;
  const BarrierRun run = solve_raq(d, Delta, delta);
  ASSERT_EQ(run.steps, 2000u);
  double slabs = 0.0;
  for (std::size_t n = 0; n <= run.steps; ++n) {
    const double t = run.times[n];
    slabs += run.error_slab_mass[n];
    // each barrier loses delta per step and gets its error slab back
    EXPECT_NEAR(run.lower_mass[n], 1.0 - t + slabs, 1e-11);
    EXPECT_NEAR(run.upper_mass[n], 1.0 - t + slabs, 1e-11);
    EXPECT_LE(run.measured_gap[n], raq_gap_bound(Delta, delta, n) + 1e-12);
    EXPECT_TRUE(run.certified[n]);
  }
  for (const auto& s : run.snapshots) EXPECT_TRUE(leq(s.lower, s.upper, 1e-12)) << s.t;
}

TEST(RaqBarriers, ZeroQuantileCutsAtTheRightEdge) {
  const RaqData d = small_data(0.0, 0.1);
  const double h = d.u0.grid().h();
  // lower: the rightmost delta goes
  const StepResult lo = raq_lower_step(d.u0, 1, d, 0.1, 1e-3);
  EXPECT_NEAR(lo.removed.total_mass(), 1e-3, 1e-14);
  EXPECT_GE(Slab::from_density(lo.removed).support().first,
            Slab::from_density(lo.kept).support().second - h);
  // upper: delta taken just below the top Delta of mass
  const DensityGrid g = apply_kernel(d.u0, 1e-3);
  const StepResult up = raq_upper_step(d.u0, 1, d, 0.1, 1e-3);
  EXPECT_NEAR(up.removed.total_mass(), 1e-3, 1e-14);
  const auto [a, b] = Slab::from_density(up.removed).support();
  EXPECT_LE(b, r_right(g, 0.1) + h);
  EXPECT_GE(a, r_right(g, 0.1 + 1e-3) - h);
}

TEST(RaqBarriers, RejectsOutOfWindow) {
  try {
    solve_raq(small_data(0.5, 0.7), 0.1, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidityWindowExceeded);
  }
  EXPECT_THROW(solve_raq(small_data(), 0.0, 1e-3), Error);
  RaqData bad = small_data();
  bad.u0 = bad.u0.scaled(0.5);
  EXPECT_THROW(solve_raq(bad, 0.1, 1e-3), Error);
}
