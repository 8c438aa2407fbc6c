#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oralab {

/// Uniform partition of [x_min, x_max] into n_cells cells of width h.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_cells);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t n_cells() const noexcept { return n_cells_; }
  double h() const noexcept { return h_; }

  double breakpoint(std::size_t k) const noexcept {
    return x_min_ + static_cast<double>(k) * h_;
  }
  double center(std::size_t i) const noexcept {
    return x_min_ + (static_cast<double>(i) + 0.5) * h_;
  }
  // Index of the cell containing x, clamped to [0, n_cells-1].
  std::size_t cell_of(double x) const noexcept;

  // x -> -x maps cells onto cells.
  bool symmetric() const noexcept { return x_min_ == -x_max_; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ &&
           a.n_cells_ == b.n_cells_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_cells_;
  double h_;
};

void require_same_grid(const Grid& a, const Grid& b);

/// Nonnegative piecewise-constant density on a Grid. Immutable.
class DensityGrid {
 public:
  explicit DensityGrid(const Grid& grid);
  DensityGrid(const Grid& grid, std::vector<double> values);

  // Exact cell averages of simple shapes.
  static DensityGrid uniform(const Grid& grid, double a, double b,
                             double mass = 1.0);
  static DensityGrid gaussian(const Grid& grid, double mean, double std_dev,
                              double mass = 1.0);
  // Piecewise-constant density with values[i] on [breaks[i], breaks[i+1]).
  static DensityGrid piecewise(const Grid& grid, std::span<const double> breaks,
                               std::span<const double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  double total_mass() const noexcept;
  double sup_norm() const noexcept;
  // Mass on [a, b], counting partial cells proportionally.
  double mass_between(double a, double b) const noexcept;

  DensityGrid scaled(double factor) const;
  DensityGrid reflected() const;  // requires a symmetric grid
  DensityGrid plus(const DensityGrid& other) const;
  // Cellwise u - w; throws if any cell would go below -tol.
  DensityGrid minus(const DensityGrid& other, double tol = 0.0) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline DensityGrid operator+(const DensityGrid& a, const DensityGrid& b) {
  return a.plus(b);
}

/// r -> mass on [r, inf), piecewise linear between grid breakpoints.
class TailFunction {
 public:
  TailFunction(const Grid& grid, std::vector<double> tail);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return tail_; }
  double at_breakpoint(std::size_t k) const noexcept { return tail_[k]; }
  double total_mass() const noexcept { return tail_.front(); }
  double operator()(double r) const noexcept;

 private:
  Grid grid_;
  std::vector<double> tail_;
};

TailFunction tail_of(const DensityGrid& u);

// Cumulative masses from the left: c[k] = mass on (-inf, x_k].
std::vector<double> left_cumulative(const DensityGrid& u);

constexpr double kOrderTolerance = 1e-12;

// u[r, inf) <= v[r, inf) + m + tol at every breakpoint, tol = 1e-12 * mass.
bool leq(const DensityGrid& u, const DensityGrid& v, double m = 0.0);

// sup_r (u[r,inf) - v[r,inf)), attained at a breakpoint.
double max_tail_excess(const DensityGrid& u, const DensityGrid& v);

// sup{x : u[x, inf) >= delta}
double r_right(const DensityGrid& u, double delta);
// inf{x : u(-inf, x] >= delta}
double r_left(const DensityGrid& u, double delta);

struct CutPair {
  DensityGrid kept;
  DensityGrid removed;
};

// Removes the rightmost delta of mass (identity for delta == 0).
CutPair cut_right(const DensityGrid& u, double delta);
// Removes the leftmost delta of mass.
CutPair cut_left(const DensityGrid& u, double delta);
// Removes the delta of mass between the (Delta+delta)- and Delta-right
// quantiles.
CutPair cut_interior(const DensityGrid& u, double Delta, double delta);
// Extension of cut_interior to all real Delta.
CutPair cut_extended(const DensityGrid& u, double Delta, double delta);

}  // namespace oralab
