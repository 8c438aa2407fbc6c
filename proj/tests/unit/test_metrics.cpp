#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oralab/metrics.hpp"

using namespace oralab;

TEST(TailSup, DisjointHalves) {
  const Grid g(-1.0, 3.0, 400);
  const DensityGrid a = DensityGrid::uniform(g, 0.0, 1.0);
  const DensityGrid b = DensityGrid::uniform(g, 0.5, 1.5);
  EXPECT_NEAR(tail_sup_distance(a, b), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(tail_sup_distance(a, a), 0.0);
  const std::vector<double> r = {0.0, 0.5, 1.0};
  const TailFunction ta = tail_of(a), tb = tail_of(b);
  EXPECT_NEAR(tail_sup_distance([&](double x) { return ta(x); }, [&](double x) { return tb(x); }, r),
              0.5, 1e-12);
}

TEST(TailSup, EmpiricalIsExactAtAtoms) {
  const Grid g(-1.0, 2.0, 300);
  const DensityGrid u = DensityGrid::uniform(g, 0.0, 1.0);
  EXPECT_NEAR(tail_sup_distance(EmpiricalTail({0.25, 0.75}, 2.0), u), 0.25, 1e-12);
  EXPECT_NEAR(tail_sup_distance(EmpiricalTail({0.5}, 1.0), u), 0.5, 1e-12);
}

TEST(TailSup, DkwBand) {
  const Grid g(-1.0, 2.0, 3000);
  const DensityGrid u = DensityGrid::uniform(g, 0.0, 1.0);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t N = 4000;
  std::vector<double> x(N);
  for (double& v : x) v = U(rng);
  const double band = std::sqrt(std::log(2.0 / 1e-4) / (2.0 * N));
  const double d = tail_sup_distance(EmpiricalTail(x, N), u);
  EXPECT_LT(d, band);
  EXPECT_GT(d, 0.0);
}

TEST(Levy, ShiftedUniformsClosedForm) {
  const Grid g(-2.0, 4.0, 6000);
  // slope 1 cdfs shifted by s sit at Levy distance s / 2; slope 1/2 at s / 3
  EXPECT_NEAR(levy_distance(DensityGrid::uniform(g, 0.0, 1.0), DensityGrid::uniform(g, 0.2, 1.2)),
              0.1, 1e-6);
  EXPECT_NEAR(levy_distance(DensityGrid::uniform(g, 0.0, 2.0), DensityGrid::uniform(g, 0.3, 2.3)),
              0.1, 1e-6);
  const DensityGrid a = DensityGrid::gaussian(g, 0.5, 0.3);
  EXPECT_NEAR(levy_distance(a, a), 0.0, 1e-8);
}

TEST(Levy, AgainstGridSearch) {
  const Grid g(-3.0, 3.0, 600);
  const DensityGrid a = DensityGrid::gaussian(g, 0.0, 0.5);
  const DensityGrid b = DensityGrid::uniform(g, -0.4, 0.9);
  const auto ca = left_cumulative(a), cb = left_cumulative(b);
  const auto F = [&](const std::vector<double>& c, double x) {
    const double pos = (x - g.x_min()) / g.h();
    if (pos <= 0) return 0.0;
    if (pos >= static_cast<double>(g.n_cells())) return c.back();
    const std::size_t k = static_cast<std::size_t>(pos);
    return c[k] + (c[k + 1] - c[k]) * (pos - static_cast<double>(k));
  };
  // smallest eps on a 1e-4 grid with F(x - eps) - eps <= G(x) <= F(x + eps) + eps
  double oracle = 1.0;
  for (double eps = 0.0; eps < 1.0; eps += 1e-4) {
    bool ok = true;
    for (double x = -3.5; x <= 3.5 && ok; x += 1e-3) {
      ok = F(ca, x - eps) - eps <= F(cb, x) + 1e-12 && F(cb, x) <= F(ca, x + eps) + eps + 1e-12;
    }
    if (ok) {
      oracle = eps;
      break;
    }
  }
  EXPECT_NEAR(levy_distance(a, b), oracle, 2e-4);
}
