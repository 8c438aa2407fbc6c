#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace oralab {

/// Continuous nondecreasing function of time with value 0 at t = 0.
/// Used for cumulative injection/removal counts I and J.
class CumulativeSchedule {
 public:
  enum class Kind { Zero, Linear, PiecewiseLinear, Power, Capped, Sum, Difference, Scaled };

  CumulativeSchedule();  // identically zero

  static CumulativeSchedule zero();
  static CumulativeSchedule linear(double rate);
  // Interpolates (times[i], values[i]); times[0] == 0, values[0] == 0, held
  // constant after the last breakpoint.
  static CumulativeSchedule piecewise_linear(std::vector<double> times,
                                             std::vector<double> values);
  // scale * t^exponent
  static CumulativeSchedule power(double scale, double exponent);
  // min(t, cap)
  static CumulativeSchedule capped(double cap);

  static CumulativeSchedule sum(const CumulativeSchedule& a, const CumulativeSchedule& b);
  // a - b; nondecreasing only if the caller guarantees it.
  static CumulativeSchedule difference(const CumulativeSchedule& a,
                                       const CumulativeSchedule& b);
  static CumulativeSchedule scaled(const CumulativeSchedule& a, double factor);

  Kind kind() const noexcept;
  double operator()(double t) const;

  // inf{t >= 0 : S(t) >= y}; +inf if the level is never reached before
  // t_limit (closed-form kinds ignore t_limit).
  double inverse(double y, double t_limit) const;

  // Kinks and other points where exact evaluation matters on [0, t_max].
  std::vector<double> breakpoints(double t_max) const;

  bool is_identically_zero() const noexcept;

  struct Impl;  // opaque

 private:
  explicit CumulativeSchedule(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// inf over [0, t_max] of (1 + I - J), on a mesh of `mesh` points plus the
// breakpoints of both schedules.
double min_one_plus_i_minus_j(const CumulativeSchedule& I,
                              const CumulativeSchedule& J, double t_max,
                              std::size_t mesh = 10000);

// True if f - g is nondecreasing on [0, t_max] (checked on a mesh).
bool difference_nondecreasing(const CumulativeSchedule& f,
                              const CumulativeSchedule& g, double t_max,
                              std::size_t mesh = 10000);

/// Quantile schedule for removal at quantile: q(t) = (1 - t) Q(t) on [0, 1],
/// q = 0 on [1, inf).
class QuantileSchedule {
 public:
  // Q constant.
  static QuantileSchedule constant_fraction(double Q);
  // Q piecewise linear through (times[i], values[i]) on [0, 1].
  static QuantileSchedule fraction_piecewise_linear(std::vector<double> times,
                                                    std::vector<double> values);
  // q itself piecewise linear through (times[i], values[i]); must satisfy
  // 0 <= q(t) <= 1 - t and times.back() == 1.
  static QuantileSchedule q_piecewise_linear(std::vector<double> times,
                                             std::vector<double> values);

  double q(double t) const;
  // Q(t) = q(t) / (1 - t) for t < 1.
  double fraction(double t) const;

  // (min, max) of q over [a, b], exact for the supported forms.
  std::pair<double, double> bounds(double a, double b) const;

  // The schedule 1 - t - q(t) of the mirrored problem.
  QuantileSchedule mirrored() const;

  bool identically_zero() const noexcept;

 private:
  enum class Form { Fraction, Direct };
  QuantileSchedule(Form form, std::vector<double> times, std::vector<double> values);

  Form form_;
  std::vector<double> times_;
  std::vector<double> values_;
};

}  // namespace oralab
