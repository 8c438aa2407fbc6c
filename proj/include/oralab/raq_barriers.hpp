#pragma once

#include <utility>

#include "oralab/barrier.hpp"
#include "oralab/rab_barriers.hpp"
#include "oralab/schedule.hpp"

namespace oralab {

struct RaqData {
  DensityGrid u0;
  QuantileSchedule q;
  double horizon = 0.5;

  void validate() const;
  // u0 reflected and q replaced by 1 - t - q.
  RaqData mirrored() const;
};

// (min q, max q) over [(n-1) delta, n delta]
std::pair<double, double> q_bounds(const RaqData& data, std::size_t n, double delta);

StepResult raq_upper_step(const DensityGrid& u_prev, std::size_t n, const RaqData& data,
                          double Delta, double delta,
                          ConvolutionMethod method = ConvolutionMethod::Direct);
StepResult raq_lower_step(const DensityGrid& u_prev, std::size_t n, const RaqData& data,
                          double Delta, double delta,
                          ConvolutionMethod method = ConvolutionMethod::Direct);

// 3 Delta + e delta n + e, e = exp(-Delta^4 / 2 delta)
double raq_gap_bound(double Delta, double delta, std::size_t n);
// n delta < 1 - 3 Delta - e
bool raq_step_certified(double Delta, double delta, std::size_t n);

BarrierRun solve_raq(const RaqData& data, double Delta, double delta,
                     const BarrierOptions& options = {}, const StepObserver& observer = {});

}  // namespace oralab
