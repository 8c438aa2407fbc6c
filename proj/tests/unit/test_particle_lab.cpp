#include <gtest/gtest.h>

#include <cmath>

#include "oralab/error.hpp"
#include "oralab/particle_lab.hpp"

using namespace oralab;

namespace {

RabData rab(double I_rate = 1.0, double J_rate = 1.0, double horizon = 0.3) {
  const Grid g(-4.0, 5.0, 360);
  InjectionSchedule inj;
  inj.atoms = AtomList::single(0.0);
  inj.I = CumulativeSchedule::linear(I_rate);
  return RabData{DensityGrid::uniform(g, 0.0, 1.0), inj, CumulativeSchedule::linear(J_rate), horizon};
}

SimulationOptions opts(std::size_t N, std::uint64_t seed = 7) {
  SimulationOptions o;
  o.N = N;
  o.seed = seed;
  o.snapshot_times = {0.1, 0.3};
  o.probe_r = {-1.0, 0.0, 0.5, 1.0, 2.0};
  return o;
}

}  // namespace

TEST(QuantileRank, CeilingWithFloorOfOne) {
  EXPECT_EQ(quantile_rank(10, 0.0), 1u);
  EXPECT_EQ(quantile_rank(10, 0.3), 3u);
  EXPECT_EQ(quantile_rank(10, 0.31), 4u);
  EXPECT_EQ(quantile_rank(3, 1.0 / 3.0), 1u);
  EXPECT_EQ(quantile_rank(10, 1.0), 10u);
  EXPECT_THROW(quantile_rank(0, 0.5), Error);
}

TEST(EmpiricalTail, CountsFromTheRight) {
  const EmpiricalTail t({0.5, -1.0, 2.0, 0.5}, 4.0);
  EXPECT_DOUBLE_EQ(t(0.5), 0.75);
  EXPECT_DOUBLE_EQ(t.strictly_above(0.5), 0.25);
  EXPECT_DOUBLE_EQ(t(-5.0), 1.0);
  EXPECT_DOUBLE_EQ(t(3.0), 0.0);
  EXPECT_THROW(EmpiricalTail({}, 0.0), Error);
}

TEST(InverseCdf, AtomsAndDensity) {
  const Grid g(0.0, 1.0, 10);
  const InverseCdf f(AtomList({{2.0, 0.5}}), DensityGrid::uniform(g, 0.0, 1.0, 0.5));
  EXPECT_DOUBLE_EQ(f.total(), 1.0);
  EXPECT_NEAR(f.cdf(0.5), 0.25, 1e-14);
  EXPECT_NEAR(f(0.25), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(f(0.75), 2.0);
  EXPECT_THROW(InverseCdf(AtomList(), std::nullopt), Error);
}

TEST(SimulateRab, RemovesTheRightmostAndIsReproducible) {
  const RabData d = rab();
  const EmpiricalTrace a = simulate_rab(d, opts(200));
  const EmpiricalTrace b = simulate_rab(d, opts(200));
  EXPECT_NEAR(static_cast<double>(a.removals.size()), 60.0, 1.0);
  EXPECT_NEAR(static_cast<double>(a.injections), 60.0, 1.0);
  EXPECT_EQ(a.ora_violations, 0u);
  for (const RemovalEvent& e : a.removals) EXPECT_EQ(e.n_right, 0u);
  ASSERT_EQ(a.snapshots.size(), 2u);
  EXPECT_EQ(a.snapshots, b.snapshots);
  EXPECT_EQ(a.probe_counts, b.probe_counts);
  EXPECT_EQ(a.probe_counts.size(), a.removals.size() * 5);

  const EmpiricalTrace c = simulate_rab(d, opts(200, 8));
  EXPECT_NE(a.snapshots, c.snapshots);
  SimulationOptions other = opts(200);
  other.replica = 1;
  EXPECT_NE(a.snapshots, simulate_rab(d, other).snapshots);

  const EmpiricalTail tail = empirical_tail(a, 0.3);
  EXPECT_NEAR(tail(-1e9), 1.0, 1.0 / 200 + 1e-12);
  EXPECT_THROW(empirical_tail(a, 0.2), Error);
  EXPECT_NEAR(a.removal_measure().total_mass(), 0.3, 1.0 / 200 + 1e-12);
}

TEST(SimulateRab, NeedsEnoughParticles) {
  // inf(1 + I - J) = 0.1 at T = 0.3, so N = 15 gives N eps0 - 1 < 1
  const RabData d = rab(0.0, 3.0);
  EXPECT_THROW(simulate_rab(d, opts(15)), Error);
  EXPECT_NO_THROW(simulate_rab(d, opts(40)));
}

TEST(SimulateRaq, RemovesTheQuantileParticle) {
  const Grid g(-4.0, 5.0, 360);
  const RaqData d{DensityGrid::uniform(g, 0.0, 1.0), QuantileSchedule::constant_fraction(0.3),
                  0.5};
  const EmpiricalTrace tr = simulate_raq(d, opts(100));
  ASSERT_EQ(tr.removals.size(), 50u);
  EXPECT_EQ(tr.ora_violations, 0u);
  for (const RemovalEvent& e : tr.removals) {
    EXPECT_EQ(e.n_right + 1, quantile_rank(e.alive_before, 0.3));
    EXPECT_EQ(e.n_right + e.n_left + 1, e.alive_before);
  }
}

TEST(Coupled, TildeStaysDominated) {
  const RabData d = rab(1.0, 1.0);
  RabData tilde = rab(1.0, 2.0);
  const CoupledTrace ct = simulate_coupled_rab(d, tilde, opts(200));
  EXPECT_GT(ct.dominance_checks, 0u);
  EXPECT_EQ(ct.dominance_violations, 0u);
  EXPECT_EQ(ct.trace.ora_violations, 0u);
  EXPECT_EQ(ct.trace_tilde.ora_violations, 0u);

  // J~ - J decreasing breaks the precondition
  try {
    simulate_coupled_rab(tilde, d, opts(200));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CouplingPreconditionViolated);
  }
}

TEST(MeasureLeq, ShiftedAtoms) {
  EXPECT_TRUE(measure_leq(AtomList::single(0.0), std::nullopt, AtomList::single(1.0),
                          std::nullopt));
  EXPECT_FALSE(measure_leq(AtomList::single(1.0), std::nullopt, AtomList::single(0.0),
                           std::nullopt));
}
