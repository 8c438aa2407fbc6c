#pragma once

#include <functional>
#include <span>

#include "oralab/grid.hpp"
#include "oralab/particle_lab.hpp"

namespace oralab {

// sup_r |a[r, inf) - b[r, inf)|. The density/density and empirical/density
// forms are exact (all candidate r are visited); the generic form samples
// the given r grid.
double tail_sup_distance(const DensityGrid& a, const DensityGrid& b);
double tail_sup_distance(const EmpiricalTail& a, const DensityGrid& b);
double tail_sup_distance(const std::function<double(double)>& a,
                         const std::function<double(double)>& b, std::span<const double> r_grid);

// Levy distance between the cumulative functions x -> mass on (-inf, x],
// found by bisection on the band width down to `resolution`; the band test
// at a fixed width is exact for these piecewise forms.
double levy_distance(const DensityGrid& a, const DensityGrid& b, double resolution = 1e-9);
double levy_distance(const EmpiricalTail& a, const DensityGrid& b, double resolution = 1e-9);

}  // namespace oralab
