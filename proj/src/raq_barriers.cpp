#include "oralab/raq_barriers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oralab/error.hpp"

namespace oralab {

void RaqData::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
  if (std::abs(u0.total_mass() - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "initial density must have mass 1 (got " << u0.total_mass() << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

RaqData RaqData::mirrored() const {
  return RaqData{u0.reflected(), q.mirrored(), horizon};
}

std::pair<double, double> q_bounds(const RaqData& data, std::size_t n, double delta) {
  const double a = static_cast<double>(n - 1) * delta;
  const double b = static_cast<double>(n) * delta;
  if (b > 1.0 + 1e-12) {
    throw Error(ErrorCode::ValidityWindowExceeded, "q bounds requested beyond t = 1");
  }
  return data.q.bounds(a, b);
}

double raq_gap_bound(double Delta, double delta, std::size_t n) {
  const double e = std::exp(-std::pow(Delta, 4.0) / (2.0 * delta));
  return 3.0 * Delta + e * delta * static_cast<double>(n) + e;
}

bool raq_step_certified(double Delta, double delta, std::size_t n) {
  const double e = std::exp(-std::pow(Delta, 4.0) / (2.0 * delta));
  return static_cast<double>(n) * delta < 1.0 - 3.0 * Delta - e;
}

namespace {

void require_window(std::size_t n, double Delta, double delta) {
  if (!(static_cast<double>(n) * delta < 1.0 - Delta)) {
    std::ostringstream os;
    os << "step " << n << " at t = " << static_cast<double>(n) * delta
       << " is outside the window t < 1 - Delta = " << 1.0 - Delta;
    throw Error(ErrorCode::ValidityWindowExceeded, os.str());
  }
}

StepResult upper_from_diffused(const DensityGrid& g, double q_plus, double Delta, double delta,
                               double e) {
  const double sigma = r_right(g, Delta);
  CutPair c = cut_extended(g, q_plus + Delta, delta);
  const double slab = e * delta;
  std::vector<double> v(c.kept.values().begin(), c.kept.values().end());
  detail::add_uniform_slab(v, g.grid(), sigma, sigma + 1.0, slab);
  return StepResult{DensityGrid(g.grid(), std::move(v)), std::move(c.removed), slab};
}

StepResult lower_from_diffused(const DensityGrid& g, double q_minus, double Delta,
                               double delta, double e) {
  const double sigma = r_left(g, Delta);
  CutPair c = cut_extended(g, q_minus - Delta - delta, delta);
  const double slab = e * delta;
  std::vector<double> v(c.kept.values().begin(), c.kept.values().end());
  detail::add_uniform_slab(v, g.grid(), sigma - 1.0, sigma, slab);
  return StepResult{DensityGrid(g.grid(), std::move(v)), std::move(c.removed), slab};
}

// Compares where the lower branch removed mass with the quantile window of
// the previous iterate widened by c_inf sqrt(delta) and the kernel reach.
void quantile_diagnostic(const DensityGrid& prev, const DensityGrid& removed, double q_lo,
                         double q_hi, double c_inf, double delta, std::size_t n) {
  const Slab s = Slab::from_density(removed);
  if (s.empty()) return;
  const double mass = prev.total_mass();
  const double slack = c_inf * std::sqrt(delta);
  const double reach = 8.0 * std::sqrt(delta);
  const double a = q_hi + slack + delta;
  const double b = q_lo - slack;
  const double left = a > 0.0 && a < mass ? r_right(prev, a) - reach : prev.grid().x_min();
  const double right = b > 0.0 && b < mass ? r_right(prev, b) + reach : prev.grid().x_max();
  const auto [lo, hi] = s.support();
  if (lo < left || hi > right) {
    std::ostringstream os;
    os << "step " << n << ": removed support [" << lo << ", " << hi
       << "] leaves the quantile window [" << left << ", " << right << "]";
    warn(WarningKind::SupportDiagnostic, os.str(), std::max(left - lo, hi - right));
  }
}

double error_factor(double Delta, double delta) {
  return std::exp(-std::pow(Delta, 4.0) / (2.0 * delta));
}

}  // namespace

StepResult raq_upper_step(const DensityGrid& u_prev, std::size_t n, const RaqData& data,
                          double Delta, double delta, ConvolutionMethod method) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "steps are numbered from 1");
  require_window(n, Delta, delta);
  const auto [q_minus, q_plus] = q_bounds(data, n, delta);
  (void)q_minus;
  return upper_from_diffused(apply_kernel(u_prev, delta, method), q_plus, Delta, delta,
                             error_factor(Delta, delta));
}

StepResult raq_lower_step(const DensityGrid& u_prev, std::size_t n, const RaqData& data,
                          double Delta, double delta, ConvolutionMethod method) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "steps are numbered from 1");
  require_window(n, Delta, delta);
  const auto [q_minus, q_plus] = q_bounds(data, n, delta);
  (void)q_plus;
  return lower_from_diffused(apply_kernel(u_prev, delta, method), q_minus, Delta, delta,
                             error_factor(Delta, delta));
}

BarrierRun solve_raq(const RaqData& data, double Delta, double delta,
                     const BarrierOptions& options, const StepObserver& observer) {
  data.validate();
  if (!(Delta > 0.0) || !(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Delta and delta must be positive");
  }
  if (data.horizon > 1.0 - 4.0 * Delta + 1e-12) {
    std::ostringstream os;
    os << "horizon " << data.horizon << " exceeds the validity horizon 1 - 4 Delta = "
       << 1.0 - 4.0 * Delta;
    throw Error(ErrorCode::ValidityWindowExceeded, os.str());
  }

  BarrierRun out;
  out.Delta = Delta;
  out.delta = delta;
  out.error_factor = error_factor(Delta, delta);
  out.steps = static_cast<std::size_t>(std::floor(data.horizon / delta + 1e-9));
  const std::vector<char> keep = detail::snapshot_mask(out.steps, delta, options);

  DensityGrid lower = data.u0;
  DensityGrid upper = data.u0;
  double c_inf = lower.sup_norm();
  const auto record = [&](std::size_t n, double t, double gap, double slab) {
    c_inf = std::max({c_inf, lower.sup_norm(), upper.sup_norm()});
    out.times.push_back(t);
    out.gap_bound.push_back(gap);
    out.lower_mass.push_back(lower.total_mass());
    out.upper_mass.push_back(upper.total_mass());
    out.error_slab_mass.push_back(slab);
    out.measured_gap.push_back(detail::sup_tail_distance(lower, upper));
    out.certified.push_back(raq_step_certified(Delta, delta, n) ? 1 : 0);
    if (keep[n]) out.snapshots.push_back(BarrierSnapshot{n, t, lower, upper});
  };
  record(0, 0.0, raq_gap_bound(Delta, delta, 0), 0.0);

  for (std::size_t n = 1; n <= out.steps; ++n) {
    const double t = static_cast<double>(n) * delta;
    require_window(n, Delta, delta);
    const auto [q_minus, q_plus] = q_bounds(data, n, delta);

    const DensityGrid lower_pre = apply_kernel(lower, delta, options.method);
    const DensityGrid upper_pre = apply_kernel(upper, delta, options.method);
    StepResult lo = lower_from_diffused(lower_pre, q_minus, Delta, delta, out.error_factor);
    StepResult up = upper_from_diffused(upper_pre, q_plus, Delta, delta, out.error_factor);
    if (options.support_diagnostic) {
      quantile_diagnostic(lower, lo.removed, q_minus - Delta, q_plus - Delta, c_inf, delta, n);
    }
    out.removal_lower.add_slab(t, lo.removed);
    out.removal_upper.add_slab(t, up.removed);

    const double gap = raq_gap_bound(Delta, delta, n);
    if (options.check_sandwich) detail::check_sandwich(lo.kept, up.kept, gap, n, t);

    if (observer) {
      StepView view;
      view.n = n;
      view.t = t;
      view.lower_before = &lower;
      view.upper_before = &upper;
      view.lower_precut = &lower_pre;
      view.upper_precut = &upper_pre;
      view.lower = &lo.kept;
      view.upper = &up.kept;
      view.removed_lower = &lo.removed;
      view.removed_upper = &up.removed;
      view.gap_bound = gap;
      observer(view);
    }

    lower = std::move(lo.kept);
    upper = std::move(up.kept);
    record(n, t, gap, up.error_slab_mass);
  }
  return out;
}

}  // namespace oralab
