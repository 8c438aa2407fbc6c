#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oralab/error.hpp"
#include "oralab/ora_diagnostics.hpp"

using namespace oralab;

TEST(Skorohod, RunningNegativeMinimum) {
  const std::vector<double> path = {0.5, -0.2, 0.1, -0.5, 0.3};
  const auto m = skorohod_map(path);
  const std::vector<double> expect = {0.0, 0.2, 0.2, 0.5, 0.5};
  ASSERT_EQ(m.size(), expect.size());
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_DOUBLE_EQ(m[i], expect[i]);
}

TEST(RGrid, SortedAndDeduplicated) {
  const std::vector<double> extra = {0.5, 2.0};
  const auto r = default_r_grid(0.0, 1.0, extra, 3);
  const std::vector<double> expect = {0.0, 0.5, 1.0, 2.0};
  EXPECT_EQ(r, expect);
  EXPECT_THROW(default_r_grid(1.0, 0.0), Error);
}

TEST(OraResidual, RightCutIsOrdered) {
  const Grid g(-1.0, 2.0, 300);
  const DensityGrid u = DensityGrid::uniform(g, 0.0, 1.0);
  const std::vector<double> r = default_r_grid(-1.0, 2.0, {}, 301);

  RemovalMeasure right;
  right.add_slab(0.1, cut_right(u, 0.1).removed);
  const std::vector<DensityGrid> pre = {u};
  // only the slab itself overlaps: max over r of (1 - r)(r - 0.9)
  EXPECT_NEAR(ora_residual_rab(pre, right, r).max, 0.0025, 1e-12);

  // removing from the left leaves mass to the right of the removal
  RemovalMeasure left;
  left.add_slab(0.1, cut_left(u, 0.1).removed);
  const OraResidual bad = ora_residual_rab(pre, left, r);
  std::size_t k = 0;
  while (std::abs(r[k] - 0.5) > 1e-9) ++k;
  EXPECT_NEAR(bad.residual[k], 0.5 * 0.1, 1e-12);
  EXPECT_NEAR(bad.max, 0.9 * 0.1, 1e-12);

  const std::vector<DensityGrid> none;
  EXPECT_THROW(ora_residual_rab(none, left, r), Error);
}

TEST(OraResidual, QuantileCutAtTheRightLevel) {
  const Grid g(-1.0, 2.0, 300);
  const DensityGrid u = DensityGrid::uniform(g, 0.0, 1.0);
  const auto q = QuantileSchedule::q_piecewise_linear({0.0, 1.0}, {0.4, 0.0});
  const double t = 0.0;  // q(t) = 0.4, 1 - t - q = 0.6
  RemovalMeasure beta;
  beta.add_slab(t, cut_interior(u, 0.4, 0.1).removed);
  const std::vector<DensityGrid> pre = {u};
  const auto r = default_r_grid(-1.0, 2.0, {}, 301);
  const OraRaqResidual res = ora_residual_raq(pre, beta, q, r);
  // slab [0.5, 0.6]: max of (0.6 - r)(r - 0.5)
  EXPECT_NEAR(res.plus.max, 0.0025, 1e-12);
  EXPECT_NEAR(res.minus.max, 0.0, 1e-14);
}

TEST(TestFunctions, DerivativesMatchFiniteDifferences) {
  const auto phis = {TestFunction::bump(0.3, 0.8, 0.9, 2.0),
                     TestFunction::polynomial_bump(-0.2, 1.1, 0.7, 0.5, -0.3)};
  for (const TestFunction& f : phis) {
    for (double x : {-0.5, -0.1, 0.2, 0.6}) {
      for (double t : {0.1, 0.3, 0.6}) {
        const double hx = 1e-5, ht = 1e-6;
        const double dx = (f(x + hx, t) - f(x - hx, t)) / (2 * hx);
        const double dxx = (f(x + hx, t) - 2 * f(x, t) + f(x - hx, t)) / (hx * hx);
        const double dt = (f(x, t + ht) - f(x, t - ht)) / (2 * ht);
        EXPECT_NEAR(f.dx(x, t), dx, 1e-6 * (1 + std::abs(dx)));
        EXPECT_NEAR(f.dxx(x, t), dxx, 1e-3 * (1 + std::abs(dxx)));
        EXPECT_NEAR(f.dt(x, t), dt, 1e-5 * (1 + std::abs(dt)));
        EXPECT_DOUBLE_EQ(f.generator(x, t), f.dt(x, t) + 0.5 * f.dxx(x, t));
      }
    }
    EXPECT_EQ(f(f.center() + f.width(), 0.1), 0.0);
    EXPECT_EQ(f(f.center(), f.t_cut()), 0.0);
  }
  EXPECT_THROW(TestFunction::bump(0.0, 3.0, 0.5).require_inside(Grid(-1.0, 1.0, 10), 1.0), Error);
  EXPECT_THROW(TestFunction::bump(0.0, 0.0, 0.5), Error);
}

TEST(WeakForm, StationaryDensityUnderNoFlow) {
  // a wide flat density away from the bump's support evolves by heat alone;
  // the residual of the exact evolution is small
  const Grid g(-6.0, 6.0, 1200);
  const DensityGrid u0 = DensityGrid::gaussian(g, 0.0, 0.8);
  const TestFunction phi = TestFunction::bump(0.2, 1.0, 0.5);
  std::vector<double> times;
  std::vector<DensityGrid> us;
  DensityGrid u = u0;
  for (int n = 0; n <= 500; ++n) {
    times.push_back(n * 1e-3);
    us.push_back(u);
    u = apply_kernel(u, 1e-3);
  }
  const double res = weak_form_residual(times, us, RemovalMeasure{}, nullptr, phi);
  EXPECT_LT(res, 1e-5);
}

TEST(SupportBounds, WindowAndErrors) {
  const Grid g(0.0, 4.0, 4);
  RemovalMeasure m;
  m.add_atom(0.1, 3.5, 0.5);
  m.add_slab(0.2, DensityGrid(g, {0, 1, 0, 0}));
  const auto [lo, hi] = support_bounds(m, 0.0, 0.3);
  EXPECT_DOUBLE_EQ(lo, 1.0);
  EXPECT_DOUBLE_EQ(hi, 3.5);
  try {
    support_bounds(m, 0.5, 0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyWindow);
  }
  EXPECT_THROW(support_bounds(m, 0.3, 0.3), Error);
}

TEST(SkorohodProfile, LowerBarrierIsConsistent) {
  const Grid g(-4.0, 5.0, 450);
  InjectionSchedule inj;
  inj.atoms = AtomList::single(0.0);
  inj.I = CumulativeSchedule::linear(1.0);
  const RabData d{DensityGrid::uniform(g, 0.0, 1.0), inj, CumulativeSchedule::linear(1.0), 0.2};
  BarrierOptions o;
  o.snapshot_stride = 1;
  const BarrierRun run = solve_rab(d, 0.2, 2e-3, o);
  const SkorohodCheck c = skorohod_consistency(skorohod_profile(run, 0.8));
  EXPECT_LT(c.reconstruction, 1e-3);
  EXPECT_LT(c.additive, 1e-12);
}
