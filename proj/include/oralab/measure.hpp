#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "oralab/grid.hpp"

namespace oralab {

struct Atom {
  double x = 0.0;
  double weight = 0.0;
};

/// Finite list of weighted point masses.
class AtomList {
 public:
  AtomList() = default;
  explicit AtomList(std::vector<Atom> atoms);

  static AtomList single(double x, double weight = 1.0);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  double total_weight() const noexcept;
  // weight on [r, inf) and on (-inf, r)
  double weight_from(double r) const noexcept;
  double weight_below(double r) const noexcept;
  std::pair<double, double> support() const;

  AtomList scaled(double factor) const;

 private:
  std::vector<Atom> atoms_;
};

/// Contiguous run of grid cells [first, first + values.size()) taken out of a
/// density. Zero cells at both ends are trimmed.
class Slab {
 public:
  Slab(const Grid& grid, std::size_t first, std::vector<double> values);
  static Slab from_density(const DensityGrid& d);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t first() const noexcept { return first_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool empty() const noexcept { return values_.empty(); }

  double mass() const noexcept;
  double mass_from(double r) const noexcept;   // on [r, inf)
  double mass_below(double r) const noexcept;  // on (-inf, r)
  // Closed hull of the cells carrying mass.
  std::pair<double, double> support() const;
  DensityGrid to_density() const;

 private:
  Grid grid_;
  std::size_t first_ = 0;
  std::vector<double> values_;
};

/// Time-stamped record of removed (or injected) mass.
class RemovalMeasure {
 public:
  struct Entry {
    double time = 0.0;
    std::variant<Slab, AtomList> payload;
    double mass = 0.0;
  };

  void add_slab(double time, const DensityGrid& removed);
  void add_slab(double time, Slab slab);
  void add_atoms(double time, AtomList atoms);
  void add_atom(double time, double x, double weight);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  double total_mass() const noexcept;
  // Mass of entries with time <= t.
  double cumulative_mass(double t) const noexcept;
  // beta([r, inf) x [0, t]) and beta((-inf, r) x [0, t])
  double mass_from(double r, double t) const noexcept;
  double mass_below(double r, double t) const noexcept;

  static double entry_mass_from(const Entry& e, double r) noexcept;
  static double entry_mass_below(const Entry& e, double r) noexcept;
  static std::pair<double, double> entry_support(const Entry& e);

 private:
  void push(Entry e);

  std::vector<Entry> entries_;
  std::vector<double> cumulative_;  // cumulative_[i] = mass of entries 0..i
};

}  // namespace oralab
