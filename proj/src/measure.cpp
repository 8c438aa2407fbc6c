#include "oralab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oralab/error.hpp"

namespace oralab {

AtomList::AtomList(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.x) || !(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorCode::InvalidArgument,
                  "atoms need finite locations and nonnegative weights");
    }
  }
}

AtomList AtomList::single(double x, double weight) {
  return AtomList({Atom{x, weight}});
}

double AtomList::total_weight() const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

double AtomList::weight_from(double r) const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) {
    if (a.x >= r) s += a.weight;
  }
  return s;
}

double AtomList::weight_below(double r) const noexcept {
  double s = 0.0;
  for (const Atom& a : atoms_) {
    if (a.x < r) s += a.weight;
  }
  return s;
}

std::pair<double, double> AtomList::support() const {
  if (atoms_.empty()) throw Error(ErrorCode::EmptyWindow, "empty atom list");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Atom& a : atoms_) {
    if (a.weight <= 0.0) continue;
    lo = std::min(lo, a.x);
    hi = std::max(hi, a.x);
  }
  if (lo > hi) throw Error(ErrorCode::EmptyWindow, "atom list carries no mass");
  return {lo, hi};
}

AtomList AtomList::scaled(double factor) const {
  std::vector<Atom> out(atoms_);
  for (Atom& a : out) a.weight *= factor;
  return AtomList(std::move(out));
}

// ---------------------------------------------------------------------------

Slab::Slab(const Grid& grid, std::size_t first, std::vector<double> values)
    : grid_(grid), first_(first), values_(std::move(values)) {
  if (first_ + values_.size() > grid_.n_cells()) {
    throw Error(ErrorCode::InvalidArgument, "slab exceeds grid");
  }
  std::size_t lo = 0;
  std::size_t hi = values_.size();
  while (lo < hi && values_[lo] == 0.0) ++lo;
  while (hi > lo && values_[hi - 1] == 0.0) --hi;
  if (lo > 0 || hi < values_.size()) {
    values_ = std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(lo),
                                  values_.begin() + static_cast<std::ptrdiff_t>(hi));
    first_ = values_.empty() ? 0 : first_ + lo;
  }
}

Slab Slab::from_density(const DensityGrid& d) {
  auto v = d.values();
  return Slab(d.grid(), 0, std::vector<double>(v.begin(), v.end()));
}

double Slab::mass() const noexcept {
  double s = 0.0;
  for (std::size_t i = values_.size(); i-- > 0;) s += grid_.h() * values_[i];
  return s;
}

double Slab::mass_from(double r) const noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const std::size_t i = first_ + j;
    const double a = grid_.breakpoint(i);
    const double b = grid_.breakpoint(i + 1);
    if (r <= a) {
      s += grid_.h() * values_[j];
    } else if (r < b) {
      s += (b - r) * values_[j];
    }
  }
  return s;
}

double Slab::mass_below(double r) const noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const std::size_t i = first_ + j;
    const double a = grid_.breakpoint(i);
    const double b = grid_.breakpoint(i + 1);
    if (r >= b) {
      s += grid_.h() * values_[j];
    } else if (r > a) {
      s += (r - a) * values_[j];
    }
  }
  return s;
}

std::pair<double, double> Slab::support() const {
  if (values_.empty()) throw Error(ErrorCode::EmptyWindow, "empty slab");
  return {grid_.breakpoint(first_), grid_.breakpoint(first_ + values_.size())};
}

DensityGrid Slab::to_density() const {
  std::vector<double> v(grid_.n_cells(), 0.0);
  std::copy(values_.begin(), values_.end(),
            v.begin() + static_cast<std::ptrdiff_t>(first_));
  return DensityGrid(grid_, std::move(v));
}

// ---------------------------------------------------------------------------

void RemovalMeasure::push(Entry e) {
  if (!entries_.empty() && e.time < entries_.back().time) {
    throw Error(ErrorCode::InvalidArgument, "removal entries must be time ordered");
  }
  const double prev = cumulative_.empty() ? 0.0 : cumulative_.back();
  cumulative_.push_back(prev + e.mass);
  entries_.push_back(std::move(e));
}

void RemovalMeasure::add_slab(double time, const DensityGrid& removed) {
  add_slab(time, Slab::from_density(removed));
}

void RemovalMeasure::add_slab(double time, Slab slab) {
  const double m = slab.mass();
  push(Entry{time, std::move(slab), m});
}

void RemovalMeasure::add_atoms(double time, AtomList atoms) {
  const double m = atoms.total_weight();
  push(Entry{time, std::move(atoms), m});
}

void RemovalMeasure::add_atom(double time, double x, double weight) {
  add_atoms(time, AtomList::single(x, weight));
}

double RemovalMeasure::total_mass() const noexcept {
  return cumulative_.empty() ? 0.0 : cumulative_.back();
}

double RemovalMeasure::cumulative_mass(double t) const noexcept {
  const auto it = std::upper_bound(entries_.begin(), entries_.end(), t,
                                   [](double x, const Entry& e) { return x < e.time; });
  if (it == entries_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - entries_.begin()) - 1];
}

double RemovalMeasure::entry_mass_from(const Entry& e, double r) noexcept {
  if (const auto* s = std::get_if<Slab>(&e.payload)) return s->mass_from(r);
  return std::get<AtomList>(e.payload).weight_from(r);
}

double RemovalMeasure::entry_mass_below(const Entry& e, double r) noexcept {
  if (const auto* s = std::get_if<Slab>(&e.payload)) return s->mass_below(r);
  return std::get<AtomList>(e.payload).weight_below(r);
}

std::pair<double, double> RemovalMeasure::entry_support(const Entry& e) {
  if (const auto* s = std::get_if<Slab>(&e.payload)) return s->support();
  return std::get<AtomList>(e.payload).support();
}

double RemovalMeasure::mass_from(double r, double t) const noexcept {
  double s = 0.0;
  for (const Entry& e : entries_) {
    if (e.time > t) break;
    s += entry_mass_from(e, r);
  }
  return s;
}

double RemovalMeasure::mass_below(double r, double t) const noexcept {
  double s = 0.0;
  for (const Entry& e : entries_) {
    if (e.time > t) break;
    s += entry_mass_below(e, r);
  }
  return s;
}

}  // namespace oralab
