#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oralab/error.hpp"
#include "oralab/grid.hpp"

using namespace oralab;

namespace {

// tail masses at breakpoints summed directly from the cell values
std::vector<double> tails(const DensityGrid& u) {
  const std::size_t n = u.size();
  std::vector<double> t(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) t[k] = t[k + 1] + u[k] * u.grid().h();
  return t;
}

DensityGrid random_density(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(g.n_cells(), 0.0);
  const std::size_t a = g.n_cells() / 4 + static_cast<std::size_t>(U(rng) * 40);
  const std::size_t b = a + 20 + static_cast<std::size_t>(U(rng) * 60);
  for (std::size_t i = a; i < b; ++i) v[i] = U(rng) < 0.2 ? 0.0 : U(rng);
  return DensityGrid(g, std::move(v));
}

}  // namespace

TEST(Grid, Geometry) {
  const Grid g(0.0, 4.0, 4);
  EXPECT_DOUBLE_EQ(g.h(), 1.0);
  EXPECT_DOUBLE_EQ(g.center(0), 0.5);
  EXPECT_DOUBLE_EQ(g.breakpoint(4), 4.0);
  EXPECT_EQ(g.cell_of(2.5), 2u);
  EXPECT_EQ(g.cell_of(-1.0), 0u);
  EXPECT_EQ(g.cell_of(10.0), 3u);
  EXPECT_FALSE(g.symmetric());
  EXPECT_TRUE(Grid(-2.0, 2.0, 8).symmetric());
  EXPECT_THROW(Grid(1.0, 0.0, 4), Error);
  EXPECT_THROW(Grid(0.0, 1.0, 0), Error);
}

TEST(DensityGrid, UniformCellAverages) {
  const Grid g(0.0, 4.0, 4);
  const DensityGrid u = DensityGrid::uniform(g, 0.5, 2.5, 2.0);
  EXPECT_DOUBLE_EQ(u[0], 0.5);
  EXPECT_DOUBLE_EQ(u[1], 1.0);
  EXPECT_DOUBLE_EQ(u[2], 0.5);
  EXPECT_DOUBLE_EQ(u[3], 0.0);
  EXPECT_DOUBLE_EQ(u.total_mass(), 2.0);
  EXPECT_DOUBLE_EQ(u.mass_between(1.5, 2.5), 0.75);
}

TEST(DensityGrid, GaussianMassAndMean) {
  const Grid g(-8.0, 8.0, 1600);
  const DensityGrid u = DensityGrid::gaussian(g, 0.7, 0.5, 3.0);
  EXPECT_NEAR(u.total_mass(), 3.0, 1e-12);
  double m1 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m1 += g.center(i) * u[i] * g.h();
  EXPECT_NEAR(m1 / 3.0, 0.7, 1e-9);
}

TEST(DensityGrid, PiecewiseAndArithmetic) {
  const Grid g(0.0, 4.0, 8);
  const std::vector<double> br = {0.0, 1.0, 3.0};
  const std::vector<double> va = {2.0, 0.5};
  const DensityGrid u = DensityGrid::piecewise(g, br, va);
  EXPECT_DOUBLE_EQ(u.total_mass(), 3.0);
  EXPECT_DOUBLE_EQ(u.scaled(2.0).total_mass(), 6.0);
  EXPECT_DOUBLE_EQ((u + u).total_mass(), 6.0);
  EXPECT_DOUBLE_EQ(u.minus(u.scaled(0.5)).total_mass(), 1.5);
  EXPECT_THROW(u.scaled(0.5).minus(u), Error);
  EXPECT_DOUBLE_EQ(u.sup_norm(), 2.0);
}

TEST(DensityGrid, RejectsNegativeValuesAndMismatch) {
  const Grid g(0.0, 1.0, 2);
  EXPECT_THROW(DensityGrid(g, {1.0, -1.0}), Error);
  EXPECT_THROW(DensityGrid(g, {1.0}), Error);
  const DensityGrid a(g, {1.0, 1.0});
  const DensityGrid b(Grid(0.0, 2.0, 2), {1.0, 1.0});
  try {
    (void)leq(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Tail, InterpolatesInsideCells) {
  const Grid g(0.0, 4.0, 4);
  const DensityGrid u = DensityGrid::uniform(g, 0.5, 2.5, 2.0);
  const TailFunction t = tail_of(u);
  EXPECT_DOUBLE_EQ(t.total_mass(), 2.0);
  EXPECT_DOUBLE_EQ(t(1.5), 1.0);
  EXPECT_DOUBLE_EQ(t(2.5), 0.25);
  EXPECT_DOUBLE_EQ(t(-3.0), 2.0);
  EXPECT_DOUBLE_EQ(t(9.0), 0.0);
  const auto c = left_cumulative(u);
  EXPECT_DOUBLE_EQ(c.front(), 0.0);
  EXPECT_DOUBLE_EQ(c.back(), 2.0);
}

TEST(Order, ShiftAndExtraMass) {
  const Grid g(-2.0, 2.0, 40);
  const DensityGrid u = DensityGrid::uniform(g, -1.0, 0.0);
  const DensityGrid v = DensityGrid::uniform(g, -0.5, 0.5);
  EXPECT_TRUE(leq(u, v));
  EXPECT_FALSE(leq(v, u));
  EXPECT_TRUE(leq(v, u, 0.5 + 1e-12));
  EXPECT_NEAR(max_tail_excess(v, u), 0.5, 1e-12);
  EXPECT_TRUE(leq(u, u + v));
}

TEST(Quantiles, RightAndLeft) {
  const Grid g(0.0, 4.0, 4);
  const DensityGrid u = DensityGrid::uniform(g, 0.5, 2.5, 2.0);
  EXPECT_DOUBLE_EQ(r_right(u, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(r_right(u, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(r_left(u, 0.25), 0.5);
  EXPECT_DOUBLE_EQ(r_left(u, 1.0), 1.5);
  EXPECT_THROW(r_right(u, 0.0), Error);
  EXPECT_THROW(r_right(u, 3.0), Error);
}

TEST(Cuts, RightAgainstBreakpointOracle) {
  std::mt19937_64 rng(3);
  const Grid g(-3.0, 3.0, 300);
  for (int rep = 0; rep < 50; ++rep) {
    const DensityGrid u = random_density(g, rng);
    const double d = 0.37 * u.total_mass();
    const CutPair c = cut_right(u, d);
    const auto tu = tails(u);
    const auto tk = tails(c.kept);
    for (std::size_t k = 0; k < tu.size(); ++k) {
      ASSERT_NEAR(tk[k], std::max(tu[k] - d, 0.0), 1e-12);
    }
    EXPECT_NEAR(c.removed.total_mass(), d, 1e-12);
    for (std::size_t i = 0; i < u.size(); ++i) {
      ASSERT_NEAR(c.kept[i] + c.removed[i], u[i], 1e-12);
    }
  }
}

TEST(Cuts, LeftAgainstBreakpointOracle) {
  std::mt19937_64 rng(4);
  const Grid g(-3.0, 3.0, 300);
  for (int rep = 0; rep < 50; ++rep) {
    const DensityGrid u = random_density(g, rng);
    const double m = u.total_mass();
    const double d = 0.21 * m;
    const CutPair c = cut_left(u, d);
    const auto tu = tails(u);
    const auto tk = tails(c.kept);
    for (std::size_t k = 0; k < tu.size(); ++k) {
      ASSERT_NEAR(tk[k], std::min(tu[k], m - d), 1e-12);
    }
  }
}

TEST(Cuts, InteriorAgainstBreakpointOracle) {
  std::mt19937_64 rng(5);
  const Grid g(-3.0, 3.0, 300);
  for (int rep = 0; rep < 50; ++rep) {
    const DensityGrid u = random_density(g, rng);
    const double m = u.total_mass();
    const double D = 0.3 * m, d = 0.25 * m;
    const CutPair c = cut_interior(u, D, d);
    const auto tu = tails(u);
    const auto tk = tails(c.kept);
    for (std::size_t k = 0; k < tu.size(); ++k) {
      ASSERT_NEAR(tk[k], tu[k] - std::clamp(tu[k] - D, 0.0, d), 1e-12);
    }
  }
}

TEST(Cuts, HandExample) {
  const Grid g(0.0, 4.0, 4);
  const DensityGrid u = DensityGrid::uniform(g, 0.5, 2.5, 2.0);
  const CutPair c = cut_interior(u, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(c.removed[1], 0.5);
  EXPECT_DOUBLE_EQ(c.removed.total_mass(), 0.5);
  EXPECT_DOUBLE_EQ(c.kept[2], 0.5);
  EXPECT_DOUBLE_EQ(cut_right(u, 0.0).removed.total_mass(), 0.0);
}

TEST(Cuts, ExtendedDispatch) {
  const Grid g(-2.0, 2.0, 64);
  const DensityGrid u = DensityGrid::gaussian(g, 0.0, 0.5);
  const double d = 0.1;
  auto same = [](const DensityGrid& a, const DensityGrid& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > 1e-14) return false;
    }
    return true;
  };
  EXPECT_TRUE(same(cut_extended(u, -0.3, d).kept, cut_right(u, d).kept));
  EXPECT_TRUE(same(cut_extended(u, 0.0, d).kept, cut_right(u, d).kept));
  EXPECT_TRUE(same(cut_extended(u, 0.4, d).kept, cut_interior(u, 0.4, d).kept));
  EXPECT_TRUE(same(cut_extended(u, 0.95, d).kept, cut_left(u, d).kept));
  EXPECT_THROW(cut_extended(u, 0.2, 0.0), Error);
}

TEST(Cuts, ReflectionSwapsLeftAndRight) {
  const Grid g(-3.0, 3.0, 300);
  std::mt19937_64 rng(8);
  const DensityGrid u = random_density(g, rng);
  const double d = 0.2 * u.total_mass();
  const DensityGrid a = cut_left(u, d).kept;
  const DensityGrid b = cut_right(u.reflected(), d).kept.reflected();
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
  EXPECT_THROW(DensityGrid(Grid(0.0, 1.0, 4)).reflected(), Error);
}

TEST(Cuts, InsufficientMass) {
  const Grid g(0.0, 1.0, 10);
  const DensityGrid u = DensityGrid::uniform(g, 0.0, 1.0, 0.5);
  try {
    cut_right(u, 0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientMass);
  }
  EXPECT_THROW(cut_interior(u, 0.3, 0.3), Error);
}
