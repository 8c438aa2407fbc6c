#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oralab/measure.hpp"
#include "oralab/rab_barriers.hpp"
#include "oralab/raq_barriers.hpp"

namespace oralab {

struct RemovalEvent {
  double time = 0.0;
  double position = 0.0;
  std::uint64_t label = 0;
  std::uint32_t alive_before = 0;  // after injections at the same time
  std::uint32_t n_right = 0;       // alive strictly right of the removed one
  std::uint32_t n_left = 0;        // alive strictly left of it
};

/// r -> #{particles >= r} / N for a sorted configuration.
class EmpiricalTail {
 public:
  EmpiricalTail(std::vector<double> sorted_positions, double N);

  double operator()(double r) const noexcept;
  // #{particles > r} / N
  double strictly_above(double r) const noexcept;
  const std::vector<double>& positions() const noexcept { return sorted_; }
  double N() const noexcept { return N_; }

 private:
  std::vector<double> sorted_;
  double N_;
};

struct EmpiricalTrace {
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshots;  // sorted ascending
  std::vector<RemovalEvent> removals;
  std::size_t injections = 0;
  std::size_t ora_violations = 0;

  // Per removal event and per probe r: alive particles >= r just before
  // the removal (after injections at the same time).
  std::vector<double> probe_r;
  std::vector<std::uint32_t> probe_counts;  // removals.size() x probe_r.size()

  std::uint32_t probe(std::size_t event, std::size_t r_index) const {
    return probe_counts[event * probe_r.size() + r_index];
  }
  std::size_t snapshot_index(double t) const;
  // Removed particles as atoms of weight 1/N.
  RemovalMeasure removal_measure() const;
};

EmpiricalTail empirical_tail(const EmpiricalTrace& trace, double t);

struct SimulationOptions {
  std::size_t N = 1000;
  std::vector<double> snapshot_times;
  std::uint64_t seed = 1;
  std::uint64_t replica = 0;
  std::vector<double> probe_r;
  // Throw InvariantViolation on the first failed per-event check instead of
  // only counting it.
  bool throw_on_violation = true;
};

EmpiricalTrace simulate_rab(const RabData& data, const SimulationOptions& options);
EmpiricalTrace simulate_raq(const RaqData& data, const SimulationOptions& options);

// c = ceil(n Q) with ceil(0) = 1, clamped to [1, n].
std::size_t quantile_rank(std::size_t n, double Q);

struct CoupledTrace {
  EmpiricalTrace trace;
  EmpiricalTrace trace_tilde;
  std::size_t dominance_checks = 0;
  std::size_t dominance_violations = 0;
};

// Couples the system for `data` with the one for `data_tilde` so that the
// tilde configuration is dominated at all times. Needs u0~ <= u0, pi~ <= pi,
// I - I~ and J~ - J nondecreasing.
CoupledTrace simulate_coupled_rab(const RabData& data, const RabData& data_tilde,
                                  const SimulationOptions& options);

// Inverse-cdf sampler for a mixture of atoms and a grid density.
class InverseCdf {
 public:
  InverseCdf(const AtomList& atoms, const std::optional<DensityGrid>& density);
  explicit InverseCdf(const DensityGrid& density);

  double total() const noexcept { return total_; }
  double cdf(double x) const noexcept;  // mass on (-inf, x]
  double operator()(double u) const;    // inf{x : cdf(x) >= u * total}

 private:
  std::vector<Atom> atoms_;  // sorted
  std::optional<DensityGrid> density_;
  std::vector<double> cum_;
  double total_ = 0.0;
};

// True if mu~ <= mu in the tail order (atoms and densities), checked at all
// atom locations and grid breakpoints.
bool measure_leq(const AtomList& a_tilde, const std::optional<DensityGrid>& d_tilde,
                 const AtomList& a, const std::optional<DensityGrid>& d);

}  // namespace oralab
