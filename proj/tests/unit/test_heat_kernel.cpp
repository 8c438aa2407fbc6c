#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oralab/error.hpp"
#include "oralab/heat_kernel.hpp"

using namespace oralab;

namespace {

double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// antiderivative of x -> Phi(x / s)
double int_Phi(double x, double s) { return x * Phi(x / s) + s * phi(x / s); }

// exact cell average of G_t 1_[a,b] over [x0, x1]
double heat_uniform_cell(double a, double b, double t, double x0, double x1) {
  const double s = std::sqrt(t);
  const double F = (int_Phi(x1 - a, s) - int_Phi(x0 - a, s)) - (int_Phi(x1 - b, s) - int_Phi(x0 - b, s));
  return F / (x1 - x0) / (b - a);
}

double second_moment(const std::vector<double>& w, double h) {
  double m = 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) m += 2.0 * std::pow(static_cast<double>(k) * h, 2) * w[k];
  return m;
}

}  // namespace

TEST(KernelWeights, NormalisedWithVarianceT) {
  for (auto [h, t] : {std::pair{0.01, 0.04}, std::pair{0.003, 1e-4}, std::pair{0.05, 0.01}}) {
    const auto w = kernel_weights(h, t);
    double s = (*w)[0];
    for (std::size_t k = 1; k < w->size(); ++k) s += 2.0 * (*w)[k];
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_NEAR(second_moment(*w, h), t, 1e-9 * t) << h << ' ' << t;
  }
}

TEST(KernelWeights, ThreePointWhenCellsAreWide) {
  const auto w = kernel_weights(1.0, 0.25);
  ASSERT_EQ(w->size(), 2u);
  EXPECT_DOUBLE_EQ((*w)[0], 0.75);
  EXPECT_DOUBLE_EQ((*w)[1], 0.125);
  EXPECT_THROW(kernel_weights(0.0, 1.0), Error);
  EXPECT_EQ(kernel_weights(0.01, 0.04).get(), kernel_weights(0.01, 0.04).get());
}

TEST(ApplyKernel, MatchesExactHeatFlowOfUniform) {
  const Grid g(-4.0, 5.0, 2304);
  const DensityGrid u = DensityGrid::uniform(g, 0.0, 1.0);
  for (double t : {0.01, 0.05, 0.3}) {
    const DensityGrid v = apply_kernel(u, t);
    double err = 0.0;
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      const double exact = heat_uniform_cell(0.0, 1.0, t, g.breakpoint(i), g.breakpoint(i + 1));
      err = std::max(err, std::abs(v[i] - exact));
    }
    EXPECT_LT(err, 5e-5) << t;
  }
}

TEST(ApplyKernel, DirectAndFftAgree) {
  const Grid g(-3.0, 3.0, 700);
  const DensityGrid u = DensityGrid::gaussian(g, 0.3, 0.4) + DensityGrid::uniform(g, -1.0, 0.2, 0.5);
  for (double t : {1e-4, 0.02, 0.4}) {
    const DensityGrid a = apply_kernel(u, t, ConvolutionMethod::Direct);
    const DensityGrid b = apply_kernel(u, t, ConvolutionMethod::Fft);
    for (std::size_t i = 0; i < u.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(ApplyKernel, ConservesMassAtReflectingEdges) {
  const Grid g(0.0, 1.0, 100);
  const DensityGrid u = DensityGrid::uniform(g, 0.0, 0.1, 2.0);
  std::size_t warnings = 0;
  ScopedWarningHandler count([&](const Warning& w) {
    if (w.kind == WarningKind::KernelWiderThanDomain) ++warnings;
  });
  const DensityGrid v = apply_kernel(u, 0.05);
  EXPECT_NEAR(v.total_mass(), 2.0, 1e-13);
  EXPECT_EQ(warnings, 1u);
  EXPECT_EQ(apply_kernel(u, 0.0).total_mass(), u.total_mass());
  EXPECT_THROW(apply_kernel(u, -1.0), Error);
}

TEST(ApplyKernel, SemigroupProperty) {
  const Grid g(-5.0, 5.0, 1000);
  const DensityGrid u = DensityGrid::uniform(g, -0.5, 0.5);
  const DensityGrid a = apply_kernel(apply_kernel(u, 0.02), 0.03);
  const DensityGrid b = apply_kernel(u, 0.05);
  for (std::size_t i = 0; i < u.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-6);
}

TEST(SmearAtoms, CellMassesOfANormal) {
  const Grid g(-2.0, 2.0, 400);
  const AtomList atoms({{0.123, 0.6}, {-0.5, 0.4}});
  for (double t : {1e-5, 0.04}) {
    const DensityGrid v = smear_atoms(g, atoms, t);
    EXPECT_NEAR(v.total_mass(), 1.0, 1e-14);
    const double s = std::sqrt(t);
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      double m = 0.0;
      for (const Atom& a : atoms.atoms()) {
        m += a.weight * (Phi((g.breakpoint(i + 1) - a.x) / s) - Phi((g.breakpoint(i) - a.x) / s));
      }
      ASSERT_NEAR(v[i] * g.h(), m, t < g.h() * g.h() ? 1e-12 : 1e-5) << t << ' ' << i;
    }
  }
  const DensityGrid at0 = smear_atoms(g, atoms, 0.0);
  EXPECT_DOUBLE_EQ(at0[g.cell_of(0.123)] * g.h(), 0.6);
}

TEST(Injection, IncrementCarriesTheScheduledMass) {
  const Grid g(-3.0, 3.0, 600);
  InjectionSchedule s;
  s.atoms = AtomList::single(0.0);
  s.I = CumulativeSchedule::power(1.0, 0.5);
  s.validate();
  for (int parts : {1, 4}) {
    const DensityGrid inc = injection_increment(g, s, 0.1, 0.2, parts);
    EXPECT_NEAR(inc.total_mass(), std::sqrt(0.2) - std::sqrt(0.1), 1e-13);
  }
  InjectionSchedule bad = s;
  bad.atoms = AtomList::single(0.0, 0.5);
  EXPECT_THROW(bad.validate(), Error);
  EXPECT_THROW(injection_increment(g, s, 0.2, 0.1), Error);
}

TEST(MildSolution, PureHeatFlowHasSmallResidual) {
  const Grid g(-6.0, 6.0, 1200);
  const DensityGrid u0 = DensityGrid::gaussian(g, 0.0, 0.7);
  DensityGrid u = u0;
  for (int n = 0; n < 50; ++n) u = apply_kernel(u, 0.004);
  InjectionSchedule none;
  EXPECT_LT(mild_solution_residual(u0, RemovalMeasure{}, none, u, 0.2), 1e-5);
}
