#include "oralab/rab_barriers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "oralab/error.hpp"

namespace oralab {

double RabData::epsilon0() const {
  return min_one_plus_i_minus_j(injection.I, J, horizon);
}

void RabData::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
  if (std::abs(u0.total_mass() - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "initial density must have mass 1 (got " << u0.total_mass() << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  injection.validate();
  if (injection.density) require_same_grid(u0.grid(), injection.density->grid());
  const double eps0 = epsilon0();
  if (!(eps0 > 0.0)) {
    std::ostringstream os;
    os << "inf(1 + I - J) over [0, T] is " << eps0 << ", must be positive";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

double default_delta(double Delta) {
  return std::clamp(std::pow(Delta, 5.0), 1e-7, 1e-3);
}

double rab_gap_bound(const RabData& data, double Delta, double delta, double t) {
  return Delta + std::exp(-std::pow(Delta, 4.0) / (2.0 * delta)) * data.J(t);
}

namespace {

double removal_in_step(const RabData& data, std::size_t n, double delta) {
  const double t = static_cast<double>(n) * delta;
  const double t_prev = static_cast<double>(n - 1) * delta;
  return data.J(t) - data.J(t_prev);
}

DensityGrid diffuse_and_inject(const DensityGrid& u, double delta, const DensityGrid* increment,
                               ConvolutionMethod method) {
  DensityGrid g = apply_kernel(u, delta, method);
  if (increment != nullptr) g = g + *increment;
  return g;
}

void infeasible(const char* which, std::size_t n, double mass, double needed) {
  std::ostringstream os;
  os << which << " barrier step " << n << ": mass " << mass
     << " cannot support a cut needing " << needed;
  throw Error(ErrorCode::InfeasibleCut, os.str());
}

StepResult lower_from_precut(const DensityGrid& pre, std::size_t n, double j) {
  if (j <= 0.0) return StepResult{pre, DensityGrid(pre.grid()), 0.0};
  const double mass = pre.total_mass();
  if (!(mass > j)) infeasible("lower", n, mass, j);
  CutPair c = cut_right(pre, j);
  return StepResult{std::move(c.kept), std::move(c.removed), 0.0};
}

StepResult upper_from_precut(const DensityGrid& pre, std::size_t n, double j, double Delta,
                             double e) {
  if (j <= 0.0) return StepResult{pre, DensityGrid(pre.grid()), 0.0};
  const double mass = pre.total_mass();
  if (!(mass > Delta + j)) infeasible("upper", n, mass, Delta + j);
  const double sigma = r_right(pre, Delta);
  CutPair c = cut_interior(pre, Delta, j);
  const double slab = e * j;
  std::vector<double> v(c.kept.values().begin(), c.kept.values().end());
  detail::add_uniform_slab(v, pre.grid(), sigma, sigma + 1.0, slab);
  return StepResult{DensityGrid(pre.grid(), std::move(v)), std::move(c.removed), slab};
}

void support_diagnostic(const DensityGrid& prev, const DensityGrid& removed, double j,
                        double delta, std::size_t n) {
  if (!(j > 0.0) || !(prev.total_mass() > 3.0 * j)) return;
  const Slab s = Slab::from_density(removed);
  if (s.empty()) return;
  const double floor = r_right(prev, 3.0 * j) - 8.0 * std::sqrt(delta);
  const double inf_support = s.support().first;
  if (inf_support < floor) {
    std::ostringstream os;
    os << "step " << n << ": removed mass reaches " << inf_support
       << ", below the expected front " << floor;
    warn(WarningKind::SupportDiagnostic, os.str(), floor - inf_support);
  }
}

BarrierRun run(const RabData& data, double Delta, double delta, bool with_upper,
               const BarrierOptions& options, const StepObserver& observer) {
  data.validate();
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  }
  if (options.sub_steps < 1) {
    throw Error(ErrorCode::InvalidArgument, "sub_steps must be >= 1");
  }
  if (with_upper) {
    if (!(Delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "Delta must be positive");
    const double eps0 = data.epsilon0();
    if (Delta >= eps0) {
      std::ostringstream os;
      os << "Delta = " << Delta << " is not below inf(1 + I - J) = " << eps0;
      throw Error(ErrorCode::DeltaTooLarge, os.str());
    }
  }

  BarrierRun out;
  out.Delta = with_upper ? Delta : 0.0;
  out.delta = delta;
  out.error_factor = with_upper ? std::exp(-std::pow(Delta, 4.0) / (2.0 * delta)) : 0.0;
  out.steps = static_cast<std::size_t>(std::floor(data.horizon / delta + 1e-9));
  const std::vector<char> keep = detail::snapshot_mask(out.steps, delta, options);
  const Grid& grid = data.u0.grid();

  DensityGrid lower = data.u0;
  DensityGrid upper = data.u0;
  const auto record = [&](std::size_t n, double t, double gap, double slab) {
    out.times.push_back(t);
    out.gap_bound.push_back(gap);
    out.lower_mass.push_back(lower.total_mass());
    out.upper_mass.push_back(with_upper ? upper.total_mass() : 0.0);
    out.error_slab_mass.push_back(slab);
    out.measured_gap.push_back(with_upper ? detail::sup_tail_distance(lower, upper) : 0.0);
    out.certified.push_back(1);
    if (keep[n]) out.snapshots.push_back(BarrierSnapshot{n, t, lower, with_upper ? upper : lower});
  };
  record(0, 0.0, with_upper ? Delta : 0.0, 0.0);

  for (std::size_t n = 1; n <= out.steps; ++n) {
    const double t = static_cast<double>(n) * delta;
    const double t_prev = static_cast<double>(n - 1) * delta;
    const double j = removal_in_step(data, n, delta);
    std::optional<DensityGrid> inc;
    if (data.injection.I(t) - data.injection.I(t_prev) > 0.0) {
      inc = injection_increment(grid, data.injection, t_prev, t, options.sub_steps);
    }
    const DensityGrid* incp = inc ? &*inc : nullptr;

    const DensityGrid lower_pre = diffuse_and_inject(lower, delta, incp, options.method);
    StepResult lo = lower_from_precut(lower_pre, n, j);
    if (options.support_diagnostic) support_diagnostic(lower, lo.removed, j, delta, n);
    out.removal_lower.add_slab(t, lo.removed);

    double gap = 0.0;
    double slab = 0.0;
    std::optional<DensityGrid> upper_pre;
    std::optional<StepResult> up;
    if (with_upper) {
      upper_pre = diffuse_and_inject(upper, delta, incp, options.method);
      up = upper_from_precut(*upper_pre, n, j, Delta, out.error_factor);
      out.removal_upper.add_slab(t, up->removed);
      slab = up->error_slab_mass;
      gap = rab_gap_bound(data, Delta, delta, t);
      if (options.check_sandwich) detail::check_sandwich(lo.kept, up->kept, gap, n, t);
    }

    if (observer) {
      StepView view;
      view.n = n;
      view.t = t;
      view.lower_before = &lower;
      view.upper_before = with_upper ? &upper : &lower;
      view.lower_precut = &lower_pre;
      view.upper_precut = with_upper ? &*upper_pre : &lower_pre;
      view.lower = &lo.kept;
      view.upper = with_upper ? &up->kept : &lo.kept;
      view.removed_lower = &lo.removed;
      view.removed_upper = with_upper ? &up->removed : &lo.removed;
      view.gap_bound = gap;
      observer(view);
    }

    lower = std::move(lo.kept);
    if (with_upper) upper = std::move(up->kept);
    record(n, t, gap, slab);
  }
  return out;
}

}  // namespace

StepResult rab_lower_step(const DensityGrid& u_prev, std::size_t n, const RabData& data,
                          double delta, const DensityGrid* increment,
                          ConvolutionMethod method) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "steps are numbered from 1");
  const DensityGrid pre = diffuse_and_inject(u_prev, delta, increment, method);
  return lower_from_precut(pre, n, removal_in_step(data, n, delta));
}

StepResult rab_upper_step(const DensityGrid& u_prev, std::size_t n, const RabData& data,
                          double Delta, double delta, const DensityGrid* increment,
                          ConvolutionMethod method) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "steps are numbered from 1");
  const double eps0 = data.epsilon0();
  if (Delta >= eps0) {
    std::ostringstream os;
    os << "Delta = " << Delta << " is not below inf(1 + I - J) = " << eps0;
    throw Error(ErrorCode::DeltaTooLarge, os.str());
  }
  const DensityGrid pre = diffuse_and_inject(u_prev, delta, increment, method);
  const double e = std::exp(-std::pow(Delta, 4.0) / (2.0 * delta));
  return upper_from_precut(pre, n, removal_in_step(data, n, delta), Delta, e);
}

BarrierRun solve_rab(const RabData& data, double Delta, double delta,
                     const BarrierOptions& options, const StepObserver& observer) {
  return run(data, Delta, delta, true, options, observer);
}

BarrierRun solve_rab_lower(const RabData& data, double delta, const BarrierOptions& options,
                           const StepObserver& observer) {
  return run(data, 0.0, delta, false, options, observer);
}

}  // namespace oralab
