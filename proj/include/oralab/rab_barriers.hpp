#pragma once

#include <utility>

#include "oralab/barrier.hpp"
#include "oralab/schedule.hpp"

namespace oralab {

struct RabData {
  DensityGrid u0;
  InjectionSchedule injection;  // pi and I
  CumulativeSchedule J;
  double horizon = 1.0;

  // inf over [0, horizon] of 1 + I - J
  double epsilon0() const;
  void validate() const;
};

// Default step for a given Delta: Delta^5 clamped to [1e-7, 1e-3].
double default_delta(double Delta);

struct StepResult {
  DensityGrid kept;
  DensityGrid removed;
  double error_slab_mass = 0.0;
};

// u_prev is the iterate at (n-1) delta; `increment` is the injection for the
// step (may be null).
StepResult rab_lower_step(const DensityGrid& u_prev, std::size_t n, const RabData& data,
                          double delta, const DensityGrid* increment = nullptr,
                          ConvolutionMethod method = ConvolutionMethod::Direct);
StepResult rab_upper_step(const DensityGrid& u_prev, std::size_t n, const RabData& data,
                          double Delta, double delta, const DensityGrid* increment = nullptr,
                          ConvolutionMethod method = ConvolutionMethod::Direct);

// Delta + exp(-Delta^4 / 2 delta) J(t)
double rab_gap_bound(const RabData& data, double Delta, double delta, double t);

BarrierRun solve_rab(const RabData& data, double Delta, double delta,
                     const BarrierOptions& options = {}, const StepObserver& observer = {});

// Lower barrier only; used for comparison runs.
BarrierRun solve_rab_lower(const RabData& data, double delta,
                           const BarrierOptions& options = {},
                           const StepObserver& observer = {});

}  // namespace oralab
