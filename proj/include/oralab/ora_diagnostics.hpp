#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "oralab/barrier.hpp"
#include "oralab/heat_kernel.hpp"
#include "oralab/measure.hpp"
#include "oralab/particle_lab.hpp"
#include "oralab/schedule.hpp"

namespace oralab {

struct OraResidual {
  std::vector<double> r;
  std::vector<double> residual;  // one per r
  double max = 0.0;
  double argmax_r = 0.0;

  void finalize();
};

struct OraRaqResidual {
  OraResidual plus;   // [u(r,inf) - c]^+ against beta((-inf,r) x dt)
  OraResidual minus;  // [u(-inf,r) - (1 - t - c)]^+ against beta((r,inf) x dt)
};

// 64 equally spaced points over [lo, hi] plus the extra points, sorted and
// deduplicated.
std::vector<double> default_r_grid(double lo, double hi, std::span<const double> extra = {},
                                   std::size_t count = 64);
// Default r grid for a run: occupied support of the iterates plus the ends
// of every removal slab.
std::vector<double> default_r_grid(const BarrierRun& run);

// pre[k] is the density just before the k-th removal entry of beta.
OraResidual ora_residual_rab(std::span<const DensityGrid> pre, const RemovalMeasure& beta,
                             std::span<const double> r_grid);
OraRaqResidual ora_residual_raq(std::span<const DensityGrid> pre, const RemovalMeasure& beta,
                                const QuantileSchedule& q, std::span<const double> r_grid);

// Streams the same sums out of a barrier solve (lower branch by default).
class OraAccumulator {
 public:
  enum class Model { Rab, Raq };
  OraAccumulator(Model model, std::vector<double> r_grid, const QuantileSchedule* q = nullptr,
                 bool upper_branch = false);

  void observe(const StepView& view);
  StepObserver observer();

  OraResidual rab() const;
  OraRaqResidual raq() const;

 private:
  void add_event(double t, const DensityGrid& pre, const DensityGrid& removed);

  Model model_;
  std::vector<double> r_;
  const QuantileSchedule* q_;
  bool upper_;
  std::vector<double> a_;  // RAB residual or I+
  std::vector<double> b_;  // I-
};

// Trace versions read the probe counts (alive particles >= r before each
// removal); r_grid is the trace's probe_r. c is shifted by +-offset/N as in
// the per-event bounds.
OraResidual ora_residual_trace_rab(const EmpiricalTrace& trace);
OraRaqResidual ora_residual_trace_raq(const EmpiricalTrace& trace, const QuantileSchedule& q,
                                      double offset = 1.0);

// Smooth test function A f(z) chi(t), z = (x - center) / width, with
// f(z) = (1 + a1 z + a2 z^2) exp(1 - 1/(1 - z^2)) on |z| < 1 and
// chi(t) = exp(1 - 1/(1 - (t/t_cut)^2)) on t < t_cut.
class TestFunction {
 public:
  enum class Kind { Bump, PolynomialBump };

  static TestFunction bump(double center, double width, double t_cut, double amplitude = 1.0);
  static TestFunction polynomial_bump(double center, double width, double t_cut, double a1,
                                      double a2, double amplitude = 1.0);

  Kind kind() const noexcept { return kind_; }
  double center() const noexcept { return center_; }
  double width() const noexcept { return width_; }
  double t_cut() const noexcept { return t_cut_; }
  double amplitude() const noexcept { return amp_; }

  double operator()(double x, double t) const noexcept;
  double dt(double x, double t) const noexcept;
  double dx(double x, double t) const noexcept;
  double dxx(double x, double t) const noexcept;
  // dt + dxx / 2
  double generator(double x, double t) const noexcept;

  // Throws SupportEscapesGrid unless the support sits inside the grid and
  // t_cut <= horizon.
  void require_inside(const Grid& grid, double horizon) const;

 private:
  TestFunction(Kind kind, double c, double w, double tc, double a1, double a2, double amp);
  // f, f', f'' at z
  void spatial(double z, double& f, double& f1, double& f2) const noexcept;
  void temporal(double t, double& chi, double& chi1) const noexcept;

  Kind kind_;
  double center_, width_, t_cut_, a1_, a2_, amp_;
};

// Eight test functions spread over [lo, hi] x [0, horizon].
std::vector<TestFunction> preset_test_functions(double lo, double hi, double horizon);

// (phi(., t), u) by the cell sum h sum_i phi(c_i, t) u_i.
double pair(const TestFunction& phi, double t, const DensityGrid& u);
double pair_generator(const TestFunction& phi, double t, const DensityGrid& u);
double pair(const TestFunction& phi, const RemovalMeasure::Entry& e);

// |-int (phi_t + phi_xx/2, u) dt - (phi(0), u0) - int phi d alpha + int phi d beta|
// with the time integral by the trapezoid rule on the step grid. Feed the
// iterates in time order, starting with t = 0.
class WeakFormAccumulator {
 public:
  WeakFormAccumulator(std::vector<TestFunction> phis, const Grid& grid, double horizon);

  void add_iterate(double t, const DensityGrid& u);
  void add_removal(const RemovalMeasure::Entry& e, double weight = 1.0);
  void add_removal(double t, const DensityGrid& removed, double weight = 1.0);
  // int phi d alpha for alpha = pi x dI on [0, horizon]
  void set_injection(const InjectionSchedule& sched, std::size_t parts = 4096);

  // Barrier observer: uses (lower + upper)/2 and the averaged removals.
  StepObserver mid_observer();

  std::vector<double> residuals() const;

 private:
  std::vector<TestFunction> phis_;
  double horizon_;
  std::vector<double> lhs_;
  std::vector<double> rhs_;
  double last_t_ = -1.0;
  std::vector<double> last_gen_;
  bool started_ = false;
};

double weak_form_residual(std::span<const double> times, std::span<const DensityGrid> u,
                          const RemovalMeasure& beta, const InjectionSchedule* sched,
                          const TestFunction& phi);

// Running -min(path ∧ 0).
std::vector<double> skorohod_map(std::span<const double> path);

struct SkorohodProfile {
  double r = 0.0;
  std::vector<double> t;
  std::vector<double> u_hat;      // u([r,inf), t)
  std::vector<double> beta_hat;   // beta((-inf,r) x [0,t])
  std::vector<double> gamma_hat;  // u_hat + beta([r,inf) x [0,t]) - beta(R x [0,t])
};

struct SkorohodCheck {
  double reconstruction = 0.0;  // sup_t |Phi(gamma_hat) - beta_hat|
  double additive = 0.0;        // sup_t |u_hat - gamma_hat - beta_hat|
};

// From the stored snapshots of a run (lower branch unless upper is set).
SkorohodProfile skorohod_profile(const BarrierRun& run, double r, bool upper = false);
// From a trace at its removal times, post-removal values; r = probe_r[k].
SkorohodProfile skorohod_profile(const EmpiricalTrace& trace, std::size_t r_index);
SkorohodCheck skorohod_consistency(const SkorohodProfile& profile);

// (inf, sup) of the supports of the entries with time in [t1, t2].
std::pair<double, double> support_bounds(const RemovalMeasure& beta, double t1, double t2);

}  // namespace oralab
