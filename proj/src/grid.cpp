#include "oralab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "normal_math.hpp"
#include "oralab/error.hpp"

namespace oralab {

Grid::Grid(double x_min, double x_max, std::size_t n_cells)
    : x_min_(x_min), x_max_(x_max), n_cells_(n_cells), h_(0.0) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_min < x_max)) {
    throw Error(ErrorCode::InvalidArgument, "grid requires finite x_min < x_max");
  }
  if (n_cells == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid requires n_cells > 0");
  }
  h_ = (x_max - x_min) / static_cast<double>(n_cells);
}

std::size_t Grid::cell_of(double x) const noexcept {
  if (!(x > x_min_)) return 0;
  const double pos = (x - x_min_) / h_;
  if (pos >= static_cast<double>(n_cells_)) return n_cells_ - 1;
  return static_cast<std::size_t>(pos);
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw Error(ErrorCode::GridMismatch,
                "densities live on different grids; resampling is not supported");
  }
}

// ---------------------------------------------------------------------------

DensityGrid::DensityGrid(const Grid& grid)
    : grid_(grid), values_(grid.n_cells(), 0.0) {}

DensityGrid::DensityGrid(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_cells()) {
    throw Error(ErrorCode::InvalidArgument, "density size does not match grid");
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument,
                  "density values must be finite and nonnegative");
    }
  }
}

DensityGrid DensityGrid::uniform(const Grid& grid, double a, double b,
                                 double mass) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "uniform requires a < b");
  const double level = mass / (b - a);
  std::vector<double> v(grid.n_cells(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double lo = std::max(a, grid.breakpoint(i));
    const double hi = std::min(b, grid.breakpoint(i + 1));
    if (hi > lo) v[i] = level * (hi - lo) / grid.h();
  }
  return DensityGrid(grid, std::move(v));
}

DensityGrid DensityGrid::gaussian(const Grid& grid, double mean, double std_dev,
                                  double mass) {
  if (!(std_dev > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gaussian requires std_dev > 0");
  }
  std::vector<double> v(grid.n_cells(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double za = (grid.breakpoint(i) - mean) / std_dev;
    const double zb = (grid.breakpoint(i + 1) - mean) / std_dev;
    v[i] = mass * detail::normal_mass(za, zb) / grid.h();
  }
  return DensityGrid(grid, std::move(v));
}

DensityGrid DensityGrid::piecewise(const Grid& grid,
                                   std::span<const double> breaks,
                                   std::span<const double> values) {
  if (breaks.size() != values.size() + 1 || values.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "piecewise density needs len(breaks) == len(values) + 1");
  }
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    if (!(breaks[p] < breaks[p + 1])) {
      throw Error(ErrorCode::InvalidArgument, "piecewise breaks must increase");
    }
  }
  std::vector<double> v(grid.n_cells(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = grid.breakpoint(i);
    const double b = grid.breakpoint(i + 1);
    double m = 0.0;
    for (std::size_t p = 0; p < values.size(); ++p) {
      const double lo = std::max(a, breaks[p]);
      const double hi = std::min(b, breaks[p + 1]);
      if (hi > lo) m += values[p] * (hi - lo);
    }
    v[i] = m / grid.h();
  }
  return DensityGrid(grid, std::move(v));
}

double DensityGrid::total_mass() const noexcept {
  double s = 0.0;
  for (std::size_t i = values_.size(); i-- > 0;) s += grid_.h() * values_[i];
  return s;
}

double DensityGrid::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, v);
  return m;
}

double DensityGrid::mass_between(double a, double b) const noexcept {
  if (!(b > a)) return 0.0;
  double m = 0.0;
  const std::size_t first = grid_.cell_of(a);
  const std::size_t last = grid_.cell_of(b);
  for (std::size_t i = first; i <= last; ++i) {
    const double lo = std::max(a, grid_.breakpoint(i));
    const double hi = std::min(b, grid_.breakpoint(i + 1));
    if (hi > lo) m += values_[i] * (hi - lo);
  }
  return m;
}

DensityGrid DensityGrid::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return DensityGrid(grid_, std::move(v));
}

DensityGrid DensityGrid::reflected() const {
  if (!grid_.symmetric()) {
    throw Error(ErrorCode::InvalidArgument, "reflection needs a symmetric grid");
  }
  std::vector<double> v(values_.rbegin(), values_.rend());
  return DensityGrid(grid_, std::move(v));
}

DensityGrid DensityGrid::plus(const DensityGrid& other) const {
  require_same_grid(grid_, other.grid_);
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return DensityGrid(grid_, std::move(v));
}

DensityGrid DensityGrid::minus(const DensityGrid& other, double tol) const {
  require_same_grid(grid_, other.grid_);
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] -= other.values_[i];
    if (v[i] < 0.0) {
      if (v[i] < -tol) {
        throw Error(ErrorCode::InvalidArgument,
                    "difference of densities is negative");
      }
      v[i] = 0.0;
    }
  }
  return DensityGrid(grid_, std::move(v));
}

// ---------------------------------------------------------------------------

TailFunction::TailFunction(const Grid& grid, std::vector<double> tail)
    : grid_(grid), tail_(std::move(tail)) {
  if (tail_.size() != grid_.n_cells() + 1) {
    throw Error(ErrorCode::InvalidArgument, "tail size must be n_cells + 1");
  }
}

double TailFunction::operator()(double r) const noexcept {
  if (r <= grid_.x_min()) return tail_.front();
  if (r >= grid_.x_max()) return 0.0;
  const double pos = (r - grid_.x_min()) / grid_.h();
  std::size_t k = static_cast<std::size_t>(pos);
  if (k >= grid_.n_cells()) k = grid_.n_cells() - 1;
  const double frac = pos - static_cast<double>(k);
  return tail_[k] + (tail_[k + 1] - tail_[k]) * frac;
}

TailFunction tail_of(const DensityGrid& u) {
  const std::size_t n = u.size();
  const double h = u.grid().h();
  std::vector<double> t(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) t[i] = t[i + 1] + h * u[i];
  return TailFunction(u.grid(), std::move(t));
}

std::vector<double> left_cumulative(const DensityGrid& u) {
  const std::size_t n = u.size();
  const double h = u.grid().h();
  std::vector<double> c(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) c[i + 1] = c[i] + h * u[i];
  return c;
}

bool leq(const DensityGrid& u, const DensityGrid& v, double m) {
  require_same_grid(u.grid(), v.grid());
  const TailFunction tu = tail_of(u);
  const TailFunction tv = tail_of(v);
  const double tol =
      kOrderTolerance * std::max({tu.total_mass(), tv.total_mass(), 1e-300});
  for (std::size_t k = 0; k < tu.values().size(); ++k) {
    if (tu.at_breakpoint(k) > tv.at_breakpoint(k) + m + tol) return false;
  }
  return true;
}

double max_tail_excess(const DensityGrid& u, const DensityGrid& v) {
  require_same_grid(u.grid(), v.grid());
  const TailFunction tu = tail_of(u);
  const TailFunction tv = tail_of(v);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tu.values().size(); ++k) {
    best = std::max(best, tu.at_breakpoint(k) - tv.at_breakpoint(k));
  }
  return best;
}

namespace {

void require_mass_above(double mass, double needed, const char* op) {
  if (!(mass > needed)) {
    std::ostringstream os;
    os << op << ": total mass " << mass << " does not exceed " << needed;
    throw Error(ErrorCode::InsufficientMass, os.str());
  }
}

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " must be finite and nonnegative");
  }
}

// Splits u by removing the mass whose coordinate (cumulative mass measured
// from one side) lies in [lo, hi]. `coord` holds that coordinate at each
// breakpoint and is monotone. Cells wholly inside the band move to `removed`
// unchanged; the (at most two) boundary cells are split fractionally so the
// removed mass is hi - lo.
CutPair band_cut(const DensityGrid& u, std::span<const double> coord, double lo,
                 double hi) {
  const std::size_t n = u.size();
  const double h = u.grid().h();
  std::vector<double> kept(n), removed(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u[i];
    double a = coord[i];
    double b = coord[i + 1];
    if (a > b) std::swap(a, b);
    kept[i] = v;
    if (v == 0.0) continue;
    const double overlap = std::min(b, hi) - std::max(a, lo);
    if (!(overlap > 0.0)) continue;
    if (a >= lo && b <= hi) {
      kept[i] = 0.0;
      removed[i] = v;
      continue;
    }
    const double r = std::clamp(overlap / h, 0.0, v);
    removed[i] = r;
    kept[i] = v - r;
  }
  return CutPair{DensityGrid(u.grid(), std::move(kept)),
                 DensityGrid(u.grid(), std::move(removed))};
}

CutPair identity_cut(const DensityGrid& u) {
  return CutPair{u, DensityGrid(u.grid())};
}

}  // namespace

double r_right(const DensityGrid& u, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "r_right requires delta > 0");
  }
  const TailFunction t = tail_of(u);
  require_mass_above(t.total_mass(), delta, "r_right");
  const Grid& g = u.grid();
  // Largest breakpoint k with tail[k] >= delta; tail[n] = 0 < delta.
  std::size_t k = g.n_cells();
  while (k > 0 && t.at_breakpoint(k) < delta) --k;
  if (t.at_breakpoint(k) < delta) return g.x_min();
  if (k == g.n_cells()) return g.x_max();
  const double v = u[k];
  const double need = delta - t.at_breakpoint(k + 1);
  const double width = v > 0.0 ? std::clamp(need / v, 0.0, g.h()) : 0.0;
  return g.breakpoint(k + 1) - width;
}

double r_left(const DensityGrid& u, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "r_left requires delta > 0");
  }
  const std::vector<double> c = left_cumulative(u);
  require_mass_above(c.back(), delta, "r_left");
  const Grid& g = u.grid();
  // Smallest breakpoint k with c[k] >= delta; c[0] = 0 < delta.
  std::size_t k = 0;
  while (k < g.n_cells() && c[k] < delta) ++k;
  if (c[k] < delta) return g.x_max();
  if (k == 0) return g.x_min();
  const double v = u[k - 1];
  const double need = delta - c[k - 1];
  const double width = v > 0.0 ? std::clamp(need / v, 0.0, g.h()) : 0.0;
  return g.breakpoint(k - 1) + width;
}

CutPair cut_right(const DensityGrid& u, double delta) {
  require_nonnegative(delta, "cut_right delta");
  if (delta == 0.0) return identity_cut(u);
  const TailFunction t = tail_of(u);
  require_mass_above(t.total_mass(), delta, "cut_right");
  return band_cut(u, t.values(), 0.0, delta);
}

CutPair cut_left(const DensityGrid& u, double delta) {
  require_nonnegative(delta, "cut_left delta");
  if (delta == 0.0) return identity_cut(u);
  const std::vector<double> c = left_cumulative(u);
  require_mass_above(c.back(), delta, "cut_left");
  return band_cut(u, c, 0.0, delta);
}

CutPair cut_interior(const DensityGrid& u, double Delta, double delta) {
  if (!(Delta > 0.0) || !std::isfinite(Delta)) {
    throw Error(ErrorCode::InvalidArgument, "cut_interior requires Delta > 0");
  }
  require_nonnegative(delta, "cut_interior delta");
  const TailFunction t = tail_of(u);
  require_mass_above(t.total_mass(), Delta + delta, "cut_interior");
  if (delta == 0.0) return identity_cut(u);
  return band_cut(u, t.values(), Delta, Delta + delta);
}

CutPair cut_extended(const DensityGrid& u, double Delta, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cut_extended requires delta > 0");
  }
  if (!std::isfinite(Delta)) {
    throw Error(ErrorCode::InvalidArgument, "cut_extended requires finite Delta");
  }
  const double mass = u.total_mass();
  require_mass_above(mass, delta, "cut_extended");
  if (Delta <= 0.0) return cut_right(u, delta);
  if (Delta + delta < mass) return cut_interior(u, Delta, delta);
  return cut_left(u, delta);
}

}  // namespace oralab
