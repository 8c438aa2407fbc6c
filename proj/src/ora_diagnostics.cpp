#include "oralab/ora_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oralab/error.hpp"

namespace oralab {

void OraResidual::finalize() {
  max = 0.0;
  argmax_r = r.empty() ? 0.0 : r.front();
  for (std::size_t k = 0; k < residual.size(); ++k) {
    if (residual[k] > max) {
      max = residual[k];
      argmax_r = r[k];
    }
  }
}

std::vector<double> default_r_grid(double lo, double hi, std::span<const double> extra,
                                   std::size_t count) {
  if (!(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "r grid needs lo <= hi");
  std::vector<double> r;
  r.reserve(count + extra.size());
  if (count == 1 || hi == lo) {
    r.push_back(0.5 * (lo + hi));
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      r.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
    }
  }
  r.insert(r.end(), extra.begin(), extra.end());
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

namespace {

std::pair<double, double> occupied(const DensityGrid& u) {
  const auto v = u.values();
  std::size_t a = 0;
  while (a < v.size() && v[a] == 0.0) ++a;
  if (a == v.size()) return {std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()};
  std::size_t b = v.size();
  while (v[b - 1] == 0.0) --b;
  return {u.grid().breakpoint(a), u.grid().breakpoint(b)};
}

}  // namespace

std::vector<double> default_r_grid(const BarrierRun& run) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const BarrierSnapshot& s : run.snapshots) {
    const auto [a, b] = occupied(s.lower);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  std::vector<double> ends;
  const auto& entries = run.removal_lower.entries();
  const std::size_t stride = std::max<std::size_t>(1, entries.size() / 32);
  for (std::size_t i = 0; i < entries.size(); i += stride) {
    if (entries[i].mass <= 0.0) continue;
    const auto [a, b] = RemovalMeasure::entry_support(entries[i]);
    ends.push_back(a);
    ends.push_back(b);
  }
  if (lo > hi) {
    if (run.snapshots.empty()) return {};
    const Grid& g = run.snapshots.front().lower.grid();
    lo = g.x_min();
    hi = g.x_max();
  }
  return default_r_grid(lo, hi, ends);
}

// ---------------------------------------------------------------------------
// ORA sums

OraAccumulator::OraAccumulator(Model model, std::vector<double> r_grid,
                               const QuantileSchedule* q, bool upper_branch)
    : model_(model), r_(std::move(r_grid)), q_(q), upper_(upper_branch),
      a_(r_.size(), 0.0), b_(r_.size(), 0.0) {
  if (model_ == Model::Raq && q_ == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "RAQ residual needs a quantile schedule");
  }
}

void OraAccumulator::add_event(double t, const DensityGrid& pre, const DensityGrid& removed) {
  const TailFunction tu = tail_of(pre);
  const TailFunction tb = tail_of(removed);
  const double mu = tu.total_mass();
  const double mb = tb.total_mass();
  if (mb <= 0.0) return;
  const double c = model_ == Model::Raq ? q_->q(t) : 0.0;
  for (std::size_t k = 0; k < r_.size(); ++k) {
    const double ur = tu(r_[k]);
    const double br = tb(r_[k]);  // beta [r, inf)
    const double below = std::max(0.0, mb - br);
    if (model_ == Model::Rab) {
      a_[k] += ur * below;
    } else {
      a_[k] += std::max(0.0, ur - c) * below;
      b_[k] += std::max(0.0, (mu - ur) - (1.0 - t - c)) * br;
    }
  }
}

void OraAccumulator::observe(const StepView& view) {
  if (upper_) {
    add_event(view.t, *view.upper_precut, *view.removed_upper);
  } else {
    add_event(view.t, *view.lower_precut, *view.removed_lower);
  }
}

StepObserver OraAccumulator::observer() {
  return [this](const StepView& v) { observe(v); };
}

OraResidual OraAccumulator::rab() const {
  OraResidual out{r_, a_, 0.0, 0.0};
  out.finalize();
  return out;
}

OraRaqResidual OraAccumulator::raq() const {
  OraRaqResidual out{OraResidual{r_, a_, 0.0, 0.0}, OraResidual{r_, b_, 0.0, 0.0}};
  out.plus.finalize();
  out.minus.finalize();
  return out;
}

namespace {

void require_aligned(std::span<const DensityGrid> pre, const RemovalMeasure& beta) {
  if (pre.size() != beta.size()) {
    std::ostringstream os;
    os << pre.size() << " pre-removal densities for " << beta.size() << " removal entries";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

OraResidual ora_residual_rab(std::span<const DensityGrid> pre, const RemovalMeasure& beta,
                             std::span<const double> r_grid) {
  require_aligned(pre, beta);
  std::vector<double> res(r_grid.size(), 0.0);
  for (std::size_t e = 0; e < pre.size(); ++e) {
    const auto& entry = beta.entries()[e];
    if (entry.mass <= 0.0) continue;
    const TailFunction tu = tail_of(pre[e]);
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
      res[k] += tu(r_grid[k]) * RemovalMeasure::entry_mass_below(entry, r_grid[k]);
    }
  }
  OraResidual out{std::vector<double>(r_grid.begin(), r_grid.end()), std::move(res), 0.0, 0.0};
  out.finalize();
  return out;
}

OraRaqResidual ora_residual_raq(std::span<const DensityGrid> pre, const RemovalMeasure& beta,
                                const QuantileSchedule& q, std::span<const double> r_grid) {
  require_aligned(pre, beta);
  std::vector<double> plus(r_grid.size(), 0.0);
  std::vector<double> minus(r_grid.size(), 0.0);
  for (std::size_t e = 0; e < pre.size(); ++e) {
    const auto& entry = beta.entries()[e];
    if (entry.mass <= 0.0) continue;
    const TailFunction tu = tail_of(pre[e]);
    const double mu = tu.total_mass();
    const double c = q.q(entry.time);
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
      const double r = r_grid[k];
      const double ur = tu(r);
      plus[k] += std::max(0.0, ur - c) * RemovalMeasure::entry_mass_below(entry, r);
      minus[k] += std::max(0.0, (mu - ur) - (1.0 - entry.time - c)) *
                  RemovalMeasure::entry_mass_from(entry, r);
    }
  }
  std::vector<double> r(r_grid.begin(), r_grid.end());
  OraRaqResidual out{OraResidual{r, std::move(plus), 0.0, 0.0},
                     OraResidual{r, std::move(minus), 0.0, 0.0}};
  out.plus.finalize();
  out.minus.finalize();
  return out;
}

OraResidual ora_residual_trace_rab(const EmpiricalTrace& trace) {
  const double N = static_cast<double>(trace.N);
  std::vector<double> res(trace.probe_r.size(), 0.0);
  for (std::size_t e = 0; e < trace.removals.size(); ++e) {
    const double x = trace.removals[e].position;
    for (std::size_t k = 0; k < trace.probe_r.size(); ++k) {
      if (x < trace.probe_r[k]) res[k] += (trace.probe(e, k) / N) * (1.0 / N);
    }
  }
  OraResidual out{trace.probe_r, std::move(res), 0.0, 0.0};
  out.finalize();
  return out;
}

OraRaqResidual ora_residual_trace_raq(const EmpiricalTrace& trace, const QuantileSchedule& q,
                                      double offset) {
  const double N = static_cast<double>(trace.N);
  std::vector<double> plus(trace.probe_r.size(), 0.0);
  std::vector<double> minus(trace.probe_r.size(), 0.0);
  for (std::size_t e = 0; e < trace.removals.size(); ++e) {
    const RemovalEvent& ev = trace.removals[e];
    const double qt = q.q(ev.time);
    const double c_plus = qt + offset / N;
    const double c_minus = qt - offset / N;
    for (std::size_t k = 0; k < trace.probe_r.size(); ++k) {
      const double r = trace.probe_r[k];
      const double right = trace.probe(e, k) / N;
      const double left = (ev.alive_before - trace.probe(e, k)) / N;
      if (ev.position < r) plus[k] += std::max(0.0, right - c_plus) / N;
      if (ev.position > r) minus[k] += std::max(0.0, left - (1.0 - ev.time - c_minus)) / N;
    }
  }
  OraRaqResidual out{OraResidual{trace.probe_r, std::move(plus), 0.0, 0.0},
                     OraResidual{trace.probe_r, std::move(minus), 0.0, 0.0}};
  out.plus.finalize();
  out.minus.finalize();
  return out;
}

// ---------------------------------------------------------------------------
// test functions

TestFunction::TestFunction(Kind kind, double c, double w, double tc, double a1, double a2,
                           double amp)
    : kind_(kind), center_(c), width_(w), t_cut_(tc), a1_(a1), a2_(a2), amp_(amp) {
  if (!(w > 0.0) || !(tc > 0.0) || !std::isfinite(c) || !std::isfinite(amp)) {
    throw Error(ErrorCode::InvalidArgument, "test function needs width > 0 and t_cut > 0");
  }
}

TestFunction TestFunction::bump(double center, double width, double t_cut, double amplitude) {
  return TestFunction(Kind::Bump, center, width, t_cut, 0.0, 0.0, amplitude);
}

TestFunction TestFunction::polynomial_bump(double center, double width, double t_cut, double a1,
                                           double a2, double amplitude) {
  return TestFunction(Kind::PolynomialBump, center, width, t_cut, a1, a2, amplitude);
}

void TestFunction::spatial(double z, double& f, double& f1, double& f2) const noexcept {
  if (!(std::abs(z) < 1.0)) {
    f = f1 = f2 = 0.0;
    return;
  }
  const double s = 1.0 - z * z;
  const double b = std::exp(1.0 - 1.0 / s);
  const double g1 = -2.0 * z / (s * s);
  const double b1 = b * g1;
  const double b2 = b * (g1 * g1 - 2.0 / (s * s) - 8.0 * z * z / (s * s * s));
  const double p = 1.0 + a1_ * z + a2_ * z * z;
  const double p1 = a1_ + 2.0 * a2_ * z;
  const double p2 = 2.0 * a2_;
  f = p * b;
  f1 = p1 * b + p * b1;
  f2 = p2 * b + 2.0 * p1 * b1 + p * b2;
}

void TestFunction::temporal(double t, double& chi, double& chi1) const noexcept {
  const double tau = t / t_cut_;
  if (!(tau < 1.0)) {
    chi = chi1 = 0.0;
    return;
  }
  const double s = 1.0 - tau * tau;
  chi = std::exp(1.0 - 1.0 / s);
  chi1 = chi * (-2.0 * tau / (s * s)) / t_cut_;
}

double TestFunction::operator()(double x, double t) const noexcept {
  double f, f1, f2, chi, chi1;
  spatial((x - center_) / width_, f, f1, f2);
  temporal(t, chi, chi1);
  return amp_ * f * chi;
}

double TestFunction::dt(double x, double t) const noexcept {
  double f, f1, f2, chi, chi1;
  spatial((x - center_) / width_, f, f1, f2);
  temporal(t, chi, chi1);
  return amp_ * f * chi1;
}

double TestFunction::dx(double x, double t) const noexcept {
  double f, f1, f2, chi, chi1;
  spatial((x - center_) / width_, f, f1, f2);
  temporal(t, chi, chi1);
  return amp_ * f1 / width_ * chi;
}

double TestFunction::dxx(double x, double t) const noexcept {
  double f, f1, f2, chi, chi1;
  spatial((x - center_) / width_, f, f1, f2);
  temporal(t, chi, chi1);
  return amp_ * f2 / (width_ * width_) * chi;
}

double TestFunction::generator(double x, double t) const noexcept {
  double f, f1, f2, chi, chi1;
  spatial((x - center_) / width_, f, f1, f2);
  temporal(t, chi, chi1);
  return amp_ * (f * chi1 + 0.5 * f2 / (width_ * width_) * chi);
}

void TestFunction::require_inside(const Grid& grid, double horizon) const {
  if (center_ - width_ < grid.x_min() || center_ + width_ > grid.x_max() ||
      t_cut_ > horizon + 1e-12) {
    std::ostringstream os;
    os << "test function support [" << center_ - width_ << ", " << center_ + width_
       << "] x [0, " << t_cut_ << "] is not inside [" << grid.x_min() << ", " << grid.x_max()
       << "] x [0, " << horizon << "]";
    throw Error(ErrorCode::SupportEscapesGrid, os.str());
  }
}

std::vector<TestFunction> preset_test_functions(double lo, double hi, double horizon) {
  const double span = hi - lo;
  const double mid = 0.5 * (lo + hi);
  const double w = 0.3 * span;
  return {
      TestFunction::bump(mid, w, horizon),
      TestFunction::bump(mid - 0.25 * span, 0.2 * span, horizon),
      TestFunction::bump(mid + 0.25 * span, 0.2 * span, horizon),
      TestFunction::bump(mid, 0.45 * span, 0.5 * horizon),
      TestFunction::polynomial_bump(mid, w, horizon, 1.0, 0.0),
      TestFunction::polynomial_bump(mid, w, horizon, 0.0, -1.0),
      TestFunction::polynomial_bump(mid - 0.1 * span, 0.35 * span, 0.75 * horizon, -0.5, 0.5),
      TestFunction::polynomial_bump(mid + 0.1 * span, 0.25 * span, horizon, 0.5, 1.0, 2.0),
  };
}

namespace {

template <class F>
double cell_sum(const TestFunction& phi, const DensityGrid& u, F&& f) {
  const Grid& g = u.grid();
  const std::size_t a = g.cell_of(phi.center() - phi.width());
  const std::size_t b = g.cell_of(phi.center() + phi.width());
  double s = 0.0;
  for (std::size_t i = a; i <= b; ++i) {
    if (u[i] != 0.0) s += f(g.center(i)) * u[i];
  }
  return s * g.h();
}

}  // namespace

double pair(const TestFunction& phi, double t, const DensityGrid& u) {
  return cell_sum(phi, u, [&](double x) { return phi(x, t); });
}

double pair_generator(const TestFunction& phi, double t, const DensityGrid& u) {
  return cell_sum(phi, u, [&](double x) { return phi.generator(x, t); });
}

double pair(const TestFunction& phi, const RemovalMeasure::Entry& e) {
  if (const auto* s = std::get_if<Slab>(&e.payload)) {
    const Grid& g = s->grid();
    double acc = 0.0;
    for (std::size_t k = 0; k < s->values().size(); ++k) {
      acc += phi(g.center(s->first() + k), e.time) * s->values()[k];
    }
    return acc * g.h();
  }
  double acc = 0.0;
  for (const Atom& a : std::get<AtomList>(e.payload).atoms()) acc += a.weight * phi(a.x, e.time);
  return acc;
}

// ---------------------------------------------------------------------------
// weak form

WeakFormAccumulator::WeakFormAccumulator(std::vector<TestFunction> phis, const Grid& grid,
                                         double horizon)
    : phis_(std::move(phis)), horizon_(horizon), lhs_(phis_.size(), 0.0),
      rhs_(phis_.size(), 0.0), last_gen_(phis_.size(), 0.0) {
  for (const TestFunction& phi : phis_) phi.require_inside(grid, horizon);
}

void WeakFormAccumulator::add_iterate(double t, const DensityGrid& u) {
  if (started_ && !(t > last_t_)) {
    throw Error(ErrorCode::InvalidArgument, "iterates must come in increasing time order");
  }
  if (!started_ && t != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "the first iterate must be the initial datum");
  }
  for (std::size_t k = 0; k < phis_.size(); ++k) {
    const double g = pair_generator(phis_[k], t, u);
    if (started_) {
      lhs_[k] -= 0.5 * (t - last_t_) * (last_gen_[k] + g);
    } else {
      rhs_[k] += pair(phis_[k], 0.0, u);
    }
    last_gen_[k] = g;
  }
  last_t_ = t;
  started_ = true;
}

void WeakFormAccumulator::add_removal(const RemovalMeasure::Entry& e, double weight) {
  for (std::size_t k = 0; k < phis_.size(); ++k) rhs_[k] -= weight * pair(phis_[k], e);
}

void WeakFormAccumulator::add_removal(double t, const DensityGrid& removed, double weight) {
  for (std::size_t k = 0; k < phis_.size(); ++k) rhs_[k] -= weight * pair(phis_[k], t, removed);
}

void WeakFormAccumulator::set_injection(const InjectionSchedule& sched, std::size_t parts) {
  if (sched.I.is_identically_zero() || parts == 0) return;
  for (std::size_t k = 0; k < phis_.size(); ++k) {
    const TestFunction& phi = phis_[k];
    const double T = std::min(horizon_, phi.t_cut());
    double acc = 0.0;
    double prev = sched.I(0.0);
    for (std::size_t j = 0; j < parts; ++j) {
      const double s0 = T * static_cast<double>(j) / static_cast<double>(parts);
      const double s1 = T * static_cast<double>(j + 1) / static_cast<double>(parts);
      const double cur = sched.I(s1);
      const double dI = cur - prev;
      prev = cur;
      if (dI == 0.0) continue;
      const double sm = 0.5 * (s0 + s1);
      double p = 0.0;
      for (const Atom& a : sched.atoms.atoms()) p += a.weight * phi(a.x, sm);
      if (sched.density) p += pair(phi, sm, *sched.density);
      acc += p * dI;
    }
    rhs_[k] += acc;
  }
}

StepObserver WeakFormAccumulator::mid_observer() {
  return [this](const StepView& v) {
    const auto mid = [](const DensityGrid& a, const DensityGrid& b) {
      std::vector<double> m(a.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
      return DensityGrid(a.grid(), std::move(m));
    };
    if (!started_) {
      add_iterate(v.t * static_cast<double>(v.n - 1) / static_cast<double>(v.n),
                  mid(*v.lower_before, *v.upper_before));
    }
    add_removal(v.t, *v.removed_lower, 0.5);
    add_removal(v.t, *v.removed_upper, 0.5);
    add_iterate(v.t, mid(*v.lower, *v.upper));
  };
}

std::vector<double> WeakFormAccumulator::residuals() const {
  std::vector<double> out(phis_.size());
  for (std::size_t k = 0; k < phis_.size(); ++k) {
    if (last_t_ < phis_[k].t_cut() - 1e-12) {
      throw Error(ErrorCode::SupportEscapesGrid,
                  "iterates end before the test function's time support");
    }
    out[k] = std::abs(lhs_[k] - rhs_[k]);
  }
  return out;
}

double weak_form_residual(std::span<const double> times, std::span<const DensityGrid> u,
                          const RemovalMeasure& beta, const InjectionSchedule* sched,
                          const TestFunction& phi) {
  if (times.size() != u.size() || u.empty()) {
    throw Error(ErrorCode::InvalidArgument, "weak form needs one time per iterate");
  }
  WeakFormAccumulator acc({phi}, u.front().grid(), times.back());
  for (std::size_t i = 0; i < u.size(); ++i) acc.add_iterate(times[i], u[i]);
  for (const auto& e : beta.entries()) acc.add_removal(e);
  if (sched) acc.set_injection(*sched);
  return acc.residuals().front();
}

// ---------------------------------------------------------------------------
// Skorohod

std::vector<double> skorohod_map(std::span<const double> path) {
  std::vector<double> out(path.size());
  double m = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    m = std::max(m, -std::min(path[i], 0.0));
    out[i] = m;
  }
  return out;
}

SkorohodProfile skorohod_profile(const BarrierRun& run, double r, bool upper) {
  SkorohodProfile p;
  p.r = r;
  const RemovalMeasure& beta = upper ? run.removal_upper : run.removal_lower;
  for (const BarrierSnapshot& s : run.snapshots) {
    const double u_hat = tail_of(upper ? s.upper : s.lower)(r);
    const double below = beta.mass_below(r, s.t);
    const double from = beta.mass_from(r, s.t);
    const double total = beta.cumulative_mass(s.t);
    p.t.push_back(s.t);
    p.u_hat.push_back(u_hat);
    p.beta_hat.push_back(below);
    p.gamma_hat.push_back(u_hat + from - total);
  }
  return p;
}

SkorohodProfile skorohod_profile(const EmpiricalTrace& trace, std::size_t r_index) {
  if (r_index >= trace.probe_r.size()) {
    throw Error(ErrorCode::InvalidArgument, "probe index out of range");
  }
  SkorohodProfile p;
  p.r = trace.probe_r[r_index];
  const double N = static_cast<double>(trace.N);
  double below = 0.0, from = 0.0, total = 0.0;
  for (std::size_t e = 0; e < trace.removals.size(); ++e) {
    const RemovalEvent& ev = trace.removals[e];
    const bool right = ev.position >= p.r;
    const double u_hat = (trace.probe(e, r_index) - (right ? 1.0 : 0.0)) / N;
    if (right) {
      from += 1.0 / N;
    } else {
      below += 1.0 / N;
    }
    total += 1.0 / N;
    p.t.push_back(ev.time);
    p.u_hat.push_back(u_hat);
    p.beta_hat.push_back(below);
    p.gamma_hat.push_back(u_hat + from - total);
  }
  return p;
}

SkorohodCheck skorohod_consistency(const SkorohodProfile& p) {
  SkorohodCheck c;
  const std::vector<double> phi = skorohod_map(p.gamma_hat);
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    c.reconstruction = std::max(c.reconstruction, std::abs(phi[i] - p.beta_hat[i]));
    c.additive = std::max(c.additive, std::abs(p.u_hat[i] - p.gamma_hat[i] - p.beta_hat[i]));
  }
  return c;
}

std::pair<double, double> support_bounds(const RemovalMeasure& beta, double t1, double t2) {
  if (!(t1 < t2)) throw Error(ErrorCode::InvalidArgument, "support window needs t1 < t2");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& e : beta.entries()) {
    if (e.time < t1 || e.time > t2 || e.mass <= 0.0) continue;
    const auto [a, b] = RemovalMeasure::entry_support(e);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  if (lo > hi) {
    std::ostringstream os;
    os << "no removal in [" << t1 << ", " << t2 << "]";
    throw Error(ErrorCode::EmptyWindow, os.str());
  }
  return {lo, hi};
}

}  // namespace oralab
