#include <gtest/gtest.h>

#include "oralab/error.hpp"
#include "oralab/measure.hpp"

using namespace oralab;

TEST(AtomList, Weights) {
  const AtomList a({{0.0, 0.5}, {1.0, 0.25}, {-1.0, 0.25}});
  EXPECT_DOUBLE_EQ(a.total_weight(), 1.0);
  EXPECT_DOUBLE_EQ(a.weight_from(0.0), 0.75);
  EXPECT_DOUBLE_EQ(a.weight_below(0.0), 0.25);
  EXPECT_DOUBLE_EQ(a.weight_from(1.0 + 1e-12), 0.0);
  const auto [lo, hi] = a.support();
  EXPECT_DOUBLE_EQ(lo, -1.0);
  EXPECT_DOUBLE_EQ(hi, 1.0);
  EXPECT_DOUBLE_EQ(a.scaled(4.0).total_weight(), 4.0);
  EXPECT_THROW(AtomList({{0.0, -1.0}}), Error);
  EXPECT_THROW(AtomList().support(), Error);
}

TEST(Slab, TrimsAndMeasures) {
  const Grid g(0.0, 10.0, 10);
  const DensityGrid d(g, {0, 0, 1, 2, 0, 0, 0, 0, 0, 0});
  const Slab s = Slab::from_density(d);
  EXPECT_EQ(s.first(), 2u);
  ASSERT_EQ(s.values().size(), 2u);
  EXPECT_DOUBLE_EQ(s.mass(), 3.0);
  EXPECT_DOUBLE_EQ(s.mass_from(3.5), 1.0);
  EXPECT_DOUBLE_EQ(s.mass_below(2.5), 0.5);
  const auto [lo, hi] = s.support();
  EXPECT_DOUBLE_EQ(lo, 2.0);
  EXPECT_DOUBLE_EQ(hi, 4.0);
  EXPECT_DOUBLE_EQ(s.to_density()[3], 2.0);
  EXPECT_TRUE(Slab::from_density(DensityGrid(g)).empty());
  EXPECT_THROW(Slab(g, 9, {1.0, 1.0}), Error);
}

TEST(RemovalMeasure, CumulativeAndSpatialMasses) {
  const Grid g(0.0, 4.0, 4);
  RemovalMeasure m;
  m.add_slab(0.1, DensityGrid(g, {0, 1, 0, 0}));
  m.add_atom(0.2, 3.5, 0.5);
  m.add_atoms(0.3, AtomList({{0.5, 0.25}, {2.5, 0.25}}));
  EXPECT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m.total_mass(), 2.0);
  EXPECT_DOUBLE_EQ(m.cumulative_mass(0.15), 1.0);
  EXPECT_DOUBLE_EQ(m.cumulative_mass(0.3), 2.0);
  EXPECT_DOUBLE_EQ(m.cumulative_mass(0.05), 0.0);
  // beta([r, inf) x [0, t]) + beta((-inf, r) x [0, t]) == beta(R x [0, t])
  for (double r : {0.0, 0.7, 1.5, 2.5, 3.9}) {
    for (double t : {0.1, 0.25, 1.0}) {
      EXPECT_NEAR(m.mass_from(r, t) + m.mass_below(r, t), m.cumulative_mass(t), 1e-15);
    }
  }
  EXPECT_DOUBLE_EQ(m.mass_from(1.5, 0.1), 0.5);
  EXPECT_DOUBLE_EQ(m.mass_from(2.5, 1.0), 0.75);
  EXPECT_THROW(m.add_atom(0.1, 0.0, 1.0), Error);
  const auto [a, b] = RemovalMeasure::entry_support(m.entries()[0]);
  EXPECT_DOUBLE_EQ(a, 1.0);
  EXPECT_DOUBLE_EQ(b, 2.0);
}
