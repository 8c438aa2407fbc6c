#include "oralab/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oralab/error.hpp"

namespace oralab {

DensityGrid BarrierSnapshot::mid() const {
  std::vector<double> v(lower.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (lower[i] + upper[i]);
  return DensityGrid(lower.grid(), std::move(v));
}

const BarrierSnapshot& BarrierRun::at_step(std::size_t n) const {
  const auto it = std::lower_bound(snapshots.begin(), snapshots.end(), n,
                                   [](const BarrierSnapshot& s, std::size_t k) { return s.n < k; });
  if (it == snapshots.end() || it->n != n) {
    std::ostringstream os;
    os << "no snapshot kept at step " << n;
    throw Error(ErrorCode::NoSnapshotAtTime, os.str());
  }
  return *it;
}

std::size_t BarrierRun::step_of(double t) const {
  if (!(t >= 0.0) || delta <= 0.0) {
    throw Error(ErrorCode::NoSnapshotAtTime, "time must be nonnegative");
  }
  const double k = std::round(t / delta);
  if (std::abs(k * delta - t) > 0.5 * delta || k > static_cast<double>(steps)) {
    std::ostringstream os;
    os << "time " << t << " is outside the run";
    throw Error(ErrorCode::NoSnapshotAtTime, os.str());
  }
  return static_cast<std::size_t>(k);
}

const BarrierSnapshot& BarrierRun::at_time(double t) const { return at_step(step_of(t)); }

namespace detail {

void add_uniform_slab(std::vector<double>& v, const Grid& grid, double a, double b,
                      double mass) {
  if (!(mass > 0.0)) return;
  const double level = mass / (b - a);
  const double h = grid.h();
  double lost_left = 0.0;
  double lost_right = 0.0;
  if (a < grid.x_min()) lost_left = level * (std::min(b, grid.x_min()) - a);
  if (b > grid.x_max()) lost_right = level * (b - std::max(a, grid.x_max()));
  const double lo = std::max(a, grid.x_min());
  const double hi = std::min(b, grid.x_max());
  if (hi > lo) {
    const std::size_t first = grid.cell_of(lo);
    const std::size_t last = grid.cell_of(hi);
    for (std::size_t i = first; i <= last; ++i) {
      const double x0 = std::max(lo, grid.breakpoint(i));
      const double x1 = std::min(hi, grid.breakpoint(i + 1));
      if (x1 > x0) v[i] += level * (x1 - x0) / h;
    }
  }
  if (lost_left > 0.0 || lost_right > 0.0) {
    v.front() += lost_left / h;
    v.back() += lost_right / h;
    std::ostringstream os;
    os << "error slab [" << a << ", " << b << "] clipped at the grid edge; "
       << lost_left + lost_right << " of mass moved into edge cells";
    warn(WarningKind::SlabClipped, os.str(), lost_left + lost_right);
  }
}

double sup_tail_distance(const DensityGrid& u, const DensityGrid& v) {
  require_same_grid(u.grid(), v.grid());
  const TailFunction tu = tail_of(u);
  const TailFunction tv = tail_of(v);
  double worst = 0.0;
  for (std::size_t k = 0; k < tu.values().size(); ++k) {
    worst = std::max(worst, std::abs(tu.at_breakpoint(k) - tv.at_breakpoint(k)));
  }
  return worst;
}

std::vector<char> snapshot_mask(std::size_t steps, double delta,
                                const BarrierOptions& options) {
  std::vector<char> keep(steps + 1, 0);
  std::size_t stride = options.snapshot_stride;
  if (stride == 0) stride = std::max<std::size_t>(1, steps / 200);
  for (std::size_t n = 0; n <= steps; n += stride) keep[n] = 1;
  keep[0] = 1;
  keep[steps] = 1;
  for (double t : options.snapshot_times) {
    const double k = std::round(t / delta);
    if (k >= 0.0 && k <= static_cast<double>(steps)) keep[static_cast<std::size_t>(k)] = 1;
  }
  return keep;
}

void check_sandwich(const DensityGrid& lower, const DensityGrid& upper, double gap,
                    std::size_t n, double t) {
  const bool lower_ok = leq(lower, upper, gap);
  const bool upper_ok = leq(upper, lower, gap);
  if (lower_ok && upper_ok) return;
  std::ostringstream os;
  os << "barrier sandwich fails at step " << n << " (t=" << t << "): ";
  if (!upper_ok) {
    os << "upper exceeds lower by " << max_tail_excess(upper, lower);
  } else {
    os << "lower exceeds upper by " << max_tail_excess(lower, upper);
  }
  os << " against bound " << gap;
  throw Error(ErrorCode::SandwichViolation, os.str());
}

}  // namespace detail

}  // namespace oralab
