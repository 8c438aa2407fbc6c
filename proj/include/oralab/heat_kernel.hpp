#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "oralab/grid.hpp"
#include "oralab/measure.hpp"
#include "oralab/schedule.hpp"

namespace oralab {

enum class ConvolutionMethod { Direct, Fft };

// Weights w[0..K] of the heat kernel at cell distance k: sampled at cell
// centres, truncated at 8 sd and normalised so that
// w[0] + 2 sum_{k>=1} w[k] == 1. When h > 1.25 sqrt(t) the three-point
// kernel with variance t is returned instead. Cached per (h, t).
std::shared_ptr<const std::vector<double>> kernel_weights(double h, double t);

// G_t u on the same grid; the grid edges reflect so mass is conserved.
DensityGrid apply_kernel(const DensityGrid& u, double t,
                         ConvolutionMethod method = ConvolutionMethod::Direct);

// Sum of the atoms' Gaussians at time t as exact cell masses; each atom keeps
// its weight exactly.
DensityGrid smear_atoms(const Grid& grid, const AtomList& atoms, double t);

// Injection law pi (atoms and/or a density of total mass 1) and the
// cumulative injection count I.
struct InjectionSchedule {
  AtomList atoms;
  std::optional<DensityGrid> density;
  CumulativeSchedule I;

  double pi_mass() const;
  void validate() const;
};

// pi smeared by the kernel at lag t (t == 0 puts atoms into their cells).
DensityGrid smear_pi(const Grid& grid, const InjectionSchedule& sched, double t);

// Midpoint-rule approximation of the injected mass on (tau, t] carried to time t.
DensityGrid injection_increment(const Grid& grid, const InjectionSchedule& sched,
                                double tau, double t, int sub_steps = 1);

DensityGrid inject(const DensityGrid& u, const InjectionSchedule& sched,
                   double tau, double t, int sub_steps = 1);

// sup |u_t - (G_t u0 + G*alpha - G*beta)|, with the injection integral taken
// with `sub_steps` midpoint parts.
double mild_solution_residual(const DensityGrid& u0, const RemovalMeasure& beta,
                              const InjectionSchedule& sched,
                              const DensityGrid& u_t, double t,
                              int sub_steps = 64);

}  // namespace oralab
