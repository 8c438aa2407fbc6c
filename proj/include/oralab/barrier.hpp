#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "oralab/grid.hpp"
#include "oralab/heat_kernel.hpp"
#include "oralab/measure.hpp"

namespace oralab {

struct BarrierOptions {
  // Keep every k-th iterate; 0 picks a stride giving about 200 snapshots.
  // The first and last iterates and the steps nearest snapshot_times are
  // always kept.
  std::size_t snapshot_stride = 0;
  std::vector<double> snapshot_times;
  int sub_steps = 1;                // injection quadrature parts per step
  ConvolutionMethod method = ConvolutionMethod::Direct;
  bool check_sandwich = true;
  bool support_diagnostic = true;
};

// Everything one barrier step produced; handed to an observer so streaming
// diagnostics do not need every iterate kept in memory.
struct StepView {
  std::size_t n = 0;
  double t = 0.0;
  const DensityGrid* lower_before = nullptr;  // iterate at step n-1
  const DensityGrid* upper_before = nullptr;
  const DensityGrid* lower_precut = nullptr;  // after diffusion and injection
  const DensityGrid* upper_precut = nullptr;
  const DensityGrid* lower = nullptr;
  const DensityGrid* upper = nullptr;
  const DensityGrid* removed_lower = nullptr;
  const DensityGrid* removed_upper = nullptr;
  double gap_bound = 0.0;
};

using StepObserver = std::function<void(const StepView&)>;

struct BarrierSnapshot {
  std::size_t n = 0;
  double t = 0.0;
  DensityGrid lower;
  DensityGrid upper;

  DensityGrid mid() const;
};

struct BarrierRun {
  double Delta = 0.0;
  double delta = 0.0;
  double error_factor = 0.0;  // exp(-Delta^4 / (2 delta))
  std::size_t steps = 0;

  std::vector<BarrierSnapshot> snapshots;
  RemovalMeasure removal_lower;
  RemovalMeasure removal_upper;

  // Per step, index 0 is the initial datum.
  std::vector<double> times;
  std::vector<double> gap_bound;
  std::vector<double> measured_gap;  // sup_r |upper tail - lower tail|
  std::vector<double> lower_mass;
  std::vector<double> upper_mass;
  std::vector<double> error_slab_mass;  // added at step n
  std::vector<char> certified;          // step lies in the certified window

  // Snapshot at exactly step n / at the step nearest to t (within delta/2).
  const BarrierSnapshot& at_step(std::size_t n) const;
  const BarrierSnapshot& at_time(double t) const;
  std::size_t step_of(double t) const;
};

namespace detail {

// Adds a uniform slab of the given mass on [a, b] to v; mass falling outside
// the grid is moved into the nearest edge cell.
void add_uniform_slab(std::vector<double>& v, const Grid& grid, double a, double b,
                      double mass);

double sup_tail_distance(const DensityGrid& u, const DensityGrid& v);

// keep[n] for n = 0..steps according to the snapshot options
std::vector<char> snapshot_mask(std::size_t steps, double delta, const BarrierOptions& options);

void check_sandwich(const DensityGrid& lower, const DensityGrid& upper, double gap,
                    std::size_t n, double t);

}  // namespace detail

}  // namespace oralab
