#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oralab/error.hpp"
#include "oralab/schedule.hpp"

using namespace oralab;

TEST(CumulativeSchedule, ClosedForms) {
  const auto lin = CumulativeSchedule::linear(2.0);
  EXPECT_DOUBLE_EQ(lin(0.3), 0.6);
  EXPECT_NEAR(lin.inverse(0.6, 1.0), 0.3, 1e-15);

  const auto pw = CumulativeSchedule::power(2.0, 0.5);
  EXPECT_DOUBLE_EQ(pw(0.25), 1.0);
  EXPECT_NEAR(pw.inverse(1.0, 1.0), 0.25, 1e-14);

  const auto cap = CumulativeSchedule::capped(0.4);
  EXPECT_DOUBLE_EQ(cap(1.0), 0.4);
  EXPECT_DOUBLE_EQ(cap(0.1), 0.1);
  EXPECT_TRUE(std::isinf(cap.inverse(0.5, 1.0)));

  EXPECT_TRUE(CumulativeSchedule().is_identically_zero());
  EXPECT_TRUE(CumulativeSchedule::linear(0.0).is_identically_zero());
  EXPECT_FALSE(lin.is_identically_zero());
}

TEST(CumulativeSchedule, PiecewiseLinear) {
  const auto s = CumulativeSchedule::piecewise_linear({0.0, 1.0, 2.0}, {0.0, 1.0, 1.5});
  EXPECT_DOUBLE_EQ(s(1.5), 1.25);
  EXPECT_DOUBLE_EQ(s(3.0), 1.5);
  EXPECT_NEAR(s.inverse(1.25, 5.0), 1.5, 1e-12);
  const auto bp = s.breakpoints(2.0);
  EXPECT_NE(std::find(bp.begin(), bp.end(), 1.0), bp.end());
  EXPECT_THROW(CumulativeSchedule::piecewise_linear({0.0, 1.0}, {0.0, -1.0}), Error);
  EXPECT_THROW(CumulativeSchedule::piecewise_linear({0.5, 1.0}, {0.0, 1.0}), Error);
  EXPECT_THROW(CumulativeSchedule::linear(-1.0), Error);
}

TEST(CumulativeSchedule, InverseIsLeftContinuousLevelTime) {
  // inverse(y) is the first time the level is reached; check against bisection
  const auto s = CumulativeSchedule::sum(CumulativeSchedule::power(0.7, 1.7),
                                         CumulativeSchedule::capped(0.2));
  for (double y : {0.05, 0.2, 0.31, 0.6}) {
    double lo = 0.0, hi = 5.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (s(mid) >= y ? hi : lo) = mid;
    }
    EXPECT_NEAR(s.inverse(y, 5.0), hi, 1e-9) << y;
  }
}

TEST(CumulativeSchedule, Combinators) {
  const auto a = CumulativeSchedule::linear(3.0);
  const auto b = CumulativeSchedule::linear(1.0);
  EXPECT_DOUBLE_EQ(CumulativeSchedule::sum(a, b)(0.5), 2.0);
  EXPECT_DOUBLE_EQ(CumulativeSchedule::difference(a, b)(0.5), 1.0);
  EXPECT_DOUBLE_EQ(CumulativeSchedule::scaled(b, 2.0)(0.5), 1.0);
  EXPECT_TRUE(difference_nondecreasing(a, b, 1.0));
  EXPECT_FALSE(difference_nondecreasing(b, a, 1.0));
}

TEST(CumulativeSchedule, EpsilonFloor) {
  const auto t = CumulativeSchedule::linear(1.0);
  EXPECT_DOUBLE_EQ(min_one_plus_i_minus_j(t, t, 1.0), 1.0);
  EXPECT_NEAR(min_one_plus_i_minus_j(CumulativeSchedule::zero(), t, 0.6), 0.4, 1e-12);
  // dip between mesh points is caught through the breakpoints
  const auto J = CumulativeSchedule::piecewise_linear({0.0, 0.333, 1.0}, {0.0, 0.9, 0.9});
  const auto I = CumulativeSchedule::linear(0.3);
  EXPECT_NEAR(min_one_plus_i_minus_j(I, J, 1.0, 7), 1.0 + 0.3 * 0.333 - 0.9, 1e-12);
}

TEST(QuantileSchedule, ConstantFraction) {
  const auto q = QuantileSchedule::constant_fraction(0.5);
  EXPECT_DOUBLE_EQ(q.q(0.2), 0.4);
  EXPECT_DOUBLE_EQ(q.fraction(0.2), 0.5);
  EXPECT_DOUBLE_EQ(q.q(1.5), 0.0);
  const auto [lo, hi] = q.bounds(0.2, 0.4);
  EXPECT_DOUBLE_EQ(lo, 0.3);
  EXPECT_DOUBLE_EQ(hi, 0.4);
  EXPECT_NEAR(q.mirrored().q(0.2), 0.4, 1e-15);
  EXPECT_TRUE(QuantileSchedule::constant_fraction(0.0).identically_zero());
  EXPECT_FALSE(q.identically_zero());
  EXPECT_THROW(QuantileSchedule::constant_fraction(1.5), Error);
}

TEST(QuantileSchedule, BoundsMatchDenseSampling) {
  const auto q = QuantileSchedule::fraction_piecewise_linear({0.0, 0.3, 1.0}, {0.1, 0.9, 0.2});
  for (auto [a, b] : {std::pair{0.0, 0.2}, std::pair{0.25, 0.7}, std::pair{0.5, 0.95}}) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i <= 20000; ++i) {
      const double v = q.q(a + (b - a) * i / 20000.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const auto [blo, bhi] = q.bounds(a, b);
    EXPECT_LE(blo, lo + 1e-12);
    EXPECT_GE(bhi, hi - 1e-12);
    EXPECT_NEAR(blo, lo, 1e-4);
    EXPECT_NEAR(bhi, hi, 1e-4);
  }
}

TEST(QuantileSchedule, DirectForm) {
  const auto q = QuantileSchedule::q_piecewise_linear({0.0, 1.0}, {0.5, 0.0});
  EXPECT_DOUBLE_EQ(q.q(0.5), 0.25);
  EXPECT_DOUBLE_EQ(q.fraction(0.5), 0.5);
  EXPECT_THROW(QuantileSchedule::q_piecewise_linear({0.0, 0.5, 1.0}, {0.5, 0.8, 0.0}), Error);
  EXPECT_THROW(QuantileSchedule::q_piecewise_linear({0.0, 0.9}, {0.5, 0.0}), Error);
}
