#include "oralab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "oralab/error.hpp"

namespace oralab {

namespace {

// x -> mass on (-inf, x] of a grid density, linear inside cells.
class Cumulative {
 public:
  explicit Cumulative(const DensityGrid& u) : grid_(u.grid()), c_(left_cumulative(u)) {}

  double operator()(double x) const noexcept {
    if (x <= grid_.x_min()) return 0.0;
    if (x >= grid_.x_max()) return c_.back();
    const double s = (x - grid_.x_min()) / grid_.h();
    std::size_t k = static_cast<std::size_t>(s);
    if (k >= grid_.n_cells()) k = grid_.n_cells() - 1;
    const double f = s - static_cast<double>(k);
    return c_[k] + f * (c_[k + 1] - c_[k]);
  }
  double total() const noexcept { return c_.back(); }
  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  std::vector<double> c_;
};

// sup_x F(x) - G(x + eps) - eps <= 0 for piecewise linear F, G; the
// difference is linear between the kinks x_k of F and y_k - eps of G.
bool band_holds(const Cumulative& F, const Cumulative& G, double eps) {
  const double tol = 1e-14 * std::max(1.0, std::max(F.total(), G.total()));
  for (std::size_t k = 0; k <= F.grid().n_cells(); ++k) {
    const double x = F.grid().breakpoint(k);
    if (F(x) - G(x + eps) - eps > tol) return false;
  }
  for (std::size_t k = 0; k <= G.grid().n_cells(); ++k) {
    const double x = G.grid().breakpoint(k) - eps;
    if (F(x) - G(x + eps) - eps > tol) return false;
  }
  return true;
}

template <class Pred>
double bisect_band(Pred&& holds, double hi, double resolution) {
  if (holds(0.0)) return 0.0;
  double lo = 0.0;
  while (!holds(hi)) hi *= 2.0;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

double tail_sup_distance(const DensityGrid& a, const DensityGrid& b) {
  require_same_grid(a.grid(), b.grid());
  const TailFunction ta = tail_of(a);
  const TailFunction tb = tail_of(b);
  double d = 0.0;
  for (std::size_t k = 0; k < ta.values().size(); ++k) {
    d = std::max(d, std::abs(ta.at_breakpoint(k) - tb.at_breakpoint(k)));
  }
  return d;
}

double tail_sup_distance(const EmpiricalTail& a, const DensityGrid& b) {
  const TailFunction tb = tail_of(b);
  const auto& p = a.positions();
  const double N = a.N();
  const double m = static_cast<double>(p.size());
  double d = std::abs(m / N - tb.total_mass());
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k > 0 && p[k] == p[k - 1]) continue;
    const auto hi = std::upper_bound(p.begin(), p.end(), p[k]);
    const double at = (m - static_cast<double>(k)) / N;  // >= p_k
    const double above = static_cast<double>(p.end() - hi) / N;
    const double t = tb(p[k]);
    d = std::max({d, std::abs(at - t), std::abs(above - t)});
  }
  return d;
}

double tail_sup_distance(const std::function<double(double)>& a,
                         const std::function<double(double)>& b, std::span<const double> r_grid) {
  double d = 0.0;
  for (double r : r_grid) d = std::max(d, std::abs(a(r) - b(r)));
  return d;
}

double levy_distance(const DensityGrid& a, const DensityGrid& b, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidArgument, "resolution must be > 0");
  const Cumulative Fa(a);
  const Cumulative Fb(b);
  const auto holds = [&](double eps) {
    return band_holds(Fb, Fa, eps) && band_holds(Fa, Fb, eps);
  };
  return bisect_band(holds, std::max({Fa.total(), Fb.total(), resolution}), resolution);
}

double levy_distance(const EmpiricalTail& a, const DensityGrid& b, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidArgument, "resolution must be > 0");
  const Cumulative Fu(b);
  const auto& p = a.positions();
  const double N = a.N();
  const double m = static_cast<double>(p.size()) / N;
  const double tol = 1e-14 * std::max(1.0, std::max(m, Fu.total()));
  const auto holds = [&](double eps) {
    if (Fu.total() - m - eps > tol) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k > 0 && p[k] == p[k - 1]) continue;
      const double below = static_cast<double>(k) / N;  // mass on (-inf, p_k)
      const double upto =
          static_cast<double>(std::upper_bound(p.begin(), p.end(), p[k]) - p.begin()) / N;
      if (upto - Fu(p[k] + eps) - eps > tol) return false;
      if (Fu(p[k] - eps) - below - eps > tol) return false;
    }
    return true;
  };
  return bisect_band(holds, std::max({m, Fu.total(), resolution}), resolution);
}

}  // namespace oralab
