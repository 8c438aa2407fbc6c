#include "oralab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oralab/error.hpp"

namespace oralab {

struct CumulativeSchedule::Impl {
  Kind kind = Kind::Zero;
  double a = 0.0;  // rate / scale / cap / factor
  double b = 0.0;  // exponent
  std::vector<double> times;
  std::vector<double> values;
  std::shared_ptr<const Impl> lhs;
  std::shared_ptr<const Impl> rhs;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Impl = CumulativeSchedule::Impl;

double evaluate(const Impl& s, double t) {
  if (t <= 0.0) return 0.0;
  switch (s.kind) {
    case CumulativeSchedule::Kind::Zero:
      return 0.0;
    case CumulativeSchedule::Kind::Linear:
      return s.a * t;
    case CumulativeSchedule::Kind::PiecewiseLinear: {
      const auto& ts = s.times;
      if (t >= ts.back()) return s.values.back();
      const auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - ts.begin());
      const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
      return s.values[i - 1] + w * (s.values[i] - s.values[i - 1]);
    }
    case CumulativeSchedule::Kind::Power:
      return s.a * std::pow(t, s.b);
    case CumulativeSchedule::Kind::Capped:
      return std::min(t, s.a);
    case CumulativeSchedule::Kind::Sum:
      return evaluate(*s.lhs, t) + evaluate(*s.rhs, t);
    case CumulativeSchedule::Kind::Difference:
      return evaluate(*s.lhs, t) - evaluate(*s.rhs, t);
    case CumulativeSchedule::Kind::Scaled:
      return s.a * evaluate(*s.lhs, t);
  }
  return 0.0;
}

double bisect_inverse(const Impl& s, double y, double t_limit) {
  if (!(t_limit > 0.0) || !std::isfinite(t_limit)) return kInf;
  if (evaluate(s, t_limit) < y) return kInf;
  double lo = 0.0;
  double hi = t_limit;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (evaluate(s, mid) >= y) hi = mid; else lo = mid;
  }
  return hi;
}

double invert(const Impl& s, double y, double t_limit) {
  if (y <= 0.0) return 0.0;
  switch (s.kind) {
    case CumulativeSchedule::Kind::Zero:
      return kInf;
    case CumulativeSchedule::Kind::Linear:
      return s.a > 0.0 ? y / s.a : kInf;
    case CumulativeSchedule::Kind::PiecewiseLinear: {
      for (std::size_t i = 1; i < s.values.size(); ++i) {
        if (s.values[i] >= y) {
          const double v0 = s.values[i - 1];
          const double v1 = s.values[i];
          const double w = (y - v0) / (v1 - v0);
          return s.times[i - 1] + w * (s.times[i] - s.times[i - 1]);
        }
      }
      return kInf;
    }
    case CumulativeSchedule::Kind::Power:
      return s.a > 0.0 ? std::pow(y / s.a, 1.0 / s.b) : kInf;
    case CumulativeSchedule::Kind::Capped:
      return y <= s.a ? y : kInf;
    case CumulativeSchedule::Kind::Scaled:
      return s.a > 0.0 ? invert(*s.lhs, y / s.a, t_limit) : kInf;
    case CumulativeSchedule::Kind::Sum:
    case CumulativeSchedule::Kind::Difference:
      return bisect_inverse(s, y, t_limit);
  }
  return kInf;
}

void collect_breakpoints(const Impl& s, double t_max, std::vector<double>& out) {
  switch (s.kind) {
    case CumulativeSchedule::Kind::PiecewiseLinear:
      for (double t : s.times) {
        if (t <= t_max) out.push_back(t);
      }
      break;
    case CumulativeSchedule::Kind::Capped:
      if (s.a <= t_max) out.push_back(s.a);
      break;
    case CumulativeSchedule::Kind::Sum:
    case CumulativeSchedule::Kind::Difference:
      collect_breakpoints(*s.lhs, t_max, out);
      collect_breakpoints(*s.rhs, t_max, out);
      break;
    case CumulativeSchedule::Kind::Scaled:
      collect_breakpoints(*s.lhs, t_max, out);
      break;
    default:
      break;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace

CumulativeSchedule::CumulativeSchedule() : impl_(std::make_shared<Impl>()) {}

CumulativeSchedule::CumulativeSchedule(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

CumulativeSchedule CumulativeSchedule::zero() { return CumulativeSchedule(); }

CumulativeSchedule CumulativeSchedule::linear(double rate) {
  require(rate >= 0.0 && std::isfinite(rate), "linear schedule needs rate >= 0");
  auto s = std::make_shared<Impl>();
  s->kind = Kind::Linear;
  s->a = rate;
  return CumulativeSchedule(std::move(s));
}

CumulativeSchedule CumulativeSchedule::piecewise_linear(std::vector<double> times,
                                                        std::vector<double> values) {
  require(times.size() == values.size() && times.size() >= 2,
          "piecewise-linear schedule needs matching times/values (>= 2 points)");
  require(times.front() == 0.0 && values.front() == 0.0,
          "piecewise-linear schedule must start at (0, 0)");
  for (std::size_t i = 1; i < times.size(); ++i) {
    require(times[i] > times[i - 1], "schedule times must increase");
    require(values[i] >= values[i - 1], "schedule values must be nondecreasing");
    require(std::isfinite(values[i]), "schedule values must be finite");
  }
  auto s = std::make_shared<Impl>();
  s->kind = Kind::PiecewiseLinear;
  s->times = std::move(times);
  s->values = std::move(values);
  return CumulativeSchedule(std::move(s));
}

CumulativeSchedule CumulativeSchedule::power(double scale, double exponent) {
  require(scale >= 0.0 && std::isfinite(scale), "power schedule needs scale >= 0");
  require(exponent > 0.0 && std::isfinite(exponent), "power schedule needs exponent > 0");
  auto s = std::make_shared<Impl>();
  s->kind = Kind::Power;
  s->a = scale;
  s->b = exponent;
  return CumulativeSchedule(std::move(s));
}

CumulativeSchedule CumulativeSchedule::capped(double cap) {
  require(cap >= 0.0 && std::isfinite(cap), "capped schedule needs cap >= 0");
  auto s = std::make_shared<Impl>();
  s->kind = Kind::Capped;
  s->a = cap;
  return CumulativeSchedule(std::move(s));
}

CumulativeSchedule CumulativeSchedule::sum(const CumulativeSchedule& a,
                                           const CumulativeSchedule& b) {
  auto s = std::make_shared<Impl>();
  s->kind = Kind::Sum;
  s->lhs = a.impl_;
  s->rhs = b.impl_;
  return CumulativeSchedule(std::move(s));
}

CumulativeSchedule CumulativeSchedule::difference(const CumulativeSchedule& a,
                                                  const CumulativeSchedule& b) {
  auto s = std::make_shared<Impl>();
  s->kind = Kind::Difference;
  s->lhs = a.impl_;
  s->rhs = b.impl_;
  return CumulativeSchedule(std::move(s));
}

CumulativeSchedule CumulativeSchedule::scaled(const CumulativeSchedule& a,
                                              double factor) {
  require(factor >= 0.0 && std::isfinite(factor), "scale factor must be >= 0");
  auto s = std::make_shared<Impl>();
  s->kind = Kind::Scaled;
  s->a = factor;
  s->lhs = a.impl_;
  return CumulativeSchedule(std::move(s));
}

CumulativeSchedule::Kind CumulativeSchedule::kind() const noexcept {
  return impl_->kind;
}

double CumulativeSchedule::operator()(double t) const { return evaluate(*impl_, t); }

double CumulativeSchedule::inverse(double y, double t_limit) const {
  return invert(*impl_, y, t_limit);
}

std::vector<double> CumulativeSchedule::breakpoints(double t_max) const {
  std::vector<double> out;
  collect_breakpoints(*impl_, t_max, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool CumulativeSchedule::is_identically_zero() const noexcept {
  switch (impl_->kind) {
    case Kind::Zero: return true;
    case Kind::Linear:
    case Kind::Power:
    case Kind::Scaled: return impl_->a == 0.0;
    case Kind::Capped: return impl_->a == 0.0;
    case Kind::PiecewiseLinear: return impl_->values.back() == 0.0;
    default: return false;
  }
}

namespace {

std::vector<double> check_times(const CumulativeSchedule& f,
                                const CumulativeSchedule& g, double t_max,
                                std::size_t mesh) {
  std::vector<double> ts;
  ts.reserve(mesh + 8);
  for (std::size_t i = 0; i <= mesh; ++i) {
    ts.push_back(t_max * static_cast<double>(i) / static_cast<double>(mesh));
  }
  for (double t : f.breakpoints(t_max)) ts.push_back(t);
  for (double t : g.breakpoints(t_max)) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

}  // namespace

double min_one_plus_i_minus_j(const CumulativeSchedule& I,
                              const CumulativeSchedule& J, double t_max,
                              std::size_t mesh) {
  double best = kInf;
  for (double t : check_times(I, J, t_max, mesh)) {
    best = std::min(best, 1.0 + I(t) - J(t));
  }
  return best;
}

bool difference_nondecreasing(const CumulativeSchedule& f,
                              const CumulativeSchedule& g, double t_max,
                              std::size_t mesh) {
  double prev = -kInf;
  for (double t : check_times(f, g, t_max, mesh)) {
    const double d = f(t) - g(t);
    if (d < prev - 1e-12) return false;
    prev = std::max(prev, d);
  }
  return true;
}

// ---------------------------------------------------------------------------

QuantileSchedule::QuantileSchedule(Form form, std::vector<double> times,
                                   std::vector<double> values)
    : form_(form), times_(std::move(times)), values_(std::move(values)) {
  require(times_.size() == values_.size() && times_.size() >= 2,
          "quantile schedule needs matching times/values (>= 2 points)");
  require(times_.front() == 0.0 && times_.back() == 1.0,
          "quantile schedule breakpoints must span [0, 1]");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    require(times_[i] > times_[i - 1], "quantile schedule times must increase");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double v = values_[i];
    require(std::isfinite(v), "quantile schedule values must be finite");
    if (form_ == Form::Fraction) {
      require(v >= 0.0 && v <= 1.0, "Q must take values in [0, 1]");
    } else {
      require(v >= -1e-15 && v <= 1.0 - times_[i] + 1e-15,
              "q must satisfy 0 <= q(t) <= 1 - t");
    }
  }
}

QuantileSchedule QuantileSchedule::constant_fraction(double Q) {
  return QuantileSchedule(Form::Fraction, {0.0, 1.0}, {Q, Q});
}

QuantileSchedule QuantileSchedule::fraction_piecewise_linear(std::vector<double> times,
                                                             std::vector<double> values) {
  return QuantileSchedule(Form::Fraction, std::move(times), std::move(values));
}

QuantileSchedule QuantileSchedule::q_piecewise_linear(std::vector<double> times,
                                                      std::vector<double> values) {
  return QuantileSchedule(Form::Direct, std::move(times), std::move(values));
}

namespace {

double interpolate(const std::vector<double>& ts, const std::vector<double>& vs,
                   double t) {
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return vs[i - 1] + w * (vs[i] - vs[i - 1]);
}

}  // namespace

double QuantileSchedule::q(double t) const {
  if (t >= 1.0) return 0.0;
  const double tt = std::max(t, 0.0);
  if (form_ == Form::Direct) return std::max(0.0, interpolate(times_, values_, tt));
  return (1.0 - tt) * interpolate(times_, values_, tt);
}

double QuantileSchedule::fraction(double t) const {
  const double tt = std::max(t, 0.0);
  if (form_ == Form::Fraction) return interpolate(times_, values_, std::min(tt, 1.0));
  if (tt >= 1.0) return 0.0;
  return q(tt) / (1.0 - tt);
}

std::pair<double, double> QuantileSchedule::bounds(double a, double b) const {
  if (b < a) std::swap(a, b);
  std::vector<double> candidates{a, b};
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    const double t0 = times_[i];
    const double t1 = times_[i + 1];
    if (t0 > a && t0 < b) candidates.push_back(t0);
    if (form_ == Form::Fraction) {
      // On [t0, t1], Q = alpha + beta t and q = (1 - t)(alpha + beta t) is a
      // parabola with vertex at (beta - alpha) / (2 beta).
      const double beta = (values_[i + 1] - values_[i]) / (t1 - t0);
      const double alpha = values_[i] - beta * t0;
      if (beta != 0.0) {
        const double vertex = (beta - alpha) / (2.0 * beta);
        if (vertex > std::max(a, t0) && vertex < std::min(b, t1)) {
          candidates.push_back(vertex);
        }
      }
    }
  }
  if (a < 1.0 && b > 1.0) candidates.push_back(1.0);
  double lo = kInf;
  double hi = -kInf;
  for (double t : candidates) {
    const double v = q(t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

QuantileSchedule QuantileSchedule::mirrored() const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = form_ == Form::Fraction ? 1.0 - values_[i]
                                   : std::max(0.0, 1.0 - times_[i] - values_[i]);
  }
  return QuantileSchedule(form_, times_, std::move(v));
}

bool QuantileSchedule::identically_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

}  // namespace oralab
