#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oralab/heat_kernel.hpp"
#include "oralab/raq_barriers.hpp"
#include "oralab/rab_barriers.hpp"

namespace oralab {

enum class Model { Rab, Raq };

const char* to_string(Model m);

struct GridSpec {
  double x_min = -6.0;
  double x_max = 7.0;
  std::size_t n_cells = 4096;

  Grid build() const { return Grid(x_min, x_max, n_cells); }
};

struct DensitySpec {
  enum class Kind { Uniform, Gaussian, Piecewise };
  Kind kind = Kind::Uniform;
  double a = 0.0, b = 1.0;          // uniform
  double mean = 0.0, std_dev = 1.0; // gaussian
  std::vector<double> breaks, values;
  double mass = 1.0;

  DensityGrid build(const Grid& grid) const;
};

struct ScheduleSpec {
  enum class Kind { Zero, Linear, PiecewiseLinear, Power, Capped };
  Kind kind = Kind::Zero;
  double rate = 1.0;
  std::vector<double> times, values;
  double scale = 1.0, exponent = 1.0;
  double cap = 1.0;

  CumulativeSchedule build() const;
};

struct QuantileSpec {
  enum class Kind { Fraction, FractionPiecewise, QPiecewise };
  Kind kind = Kind::Fraction;
  double Q = 0.5;
  std::vector<double> times, values;

  QuantileSchedule build() const;
};

struct EmitFlags {
  bool density = true;
  bool gap = true;
  bool removal = true;
  bool convergence = true;
  bool ora = true;
  bool traces = false;
  bool plots = true;
};

/// One experiment description. Parsed from a versioned JSON document in
/// which unknown keys are errors.
struct Scenario {
  static constexpr int kSchema = 1;

  std::string name = "scenario";
  Model model = Model::Rab;
  GridSpec grid;
  DensitySpec u0;
  std::vector<Atom> pi_atoms;
  std::optional<DensitySpec> pi_density;
  ScheduleSpec I, J;
  QuantileSpec q;
  double horizon = 1.0;

  // solver
  std::vector<double> Deltas;
  std::vector<double> deltas;  // empty: default_delta(Delta) per Delta
  ConvolutionMethod method = ConvolutionMethod::Direct;
  int sub_steps = 1;
  std::size_t snapshot_stride = 0;

  // simulation
  std::vector<std::size_t> Ns;
  std::size_t replicas = 1;
  std::uint64_t seed = 1;

  // outputs
  std::vector<double> snapshot_times;
  std::vector<double> r_grid;  // empty: default grid of r_count points
  std::size_t r_count = 64;
  EmitFlags emit;

  // compare task: paired scenario with J scaled by this factor (0 disables)
  // and, for RAQ with q == 0, the boundary-removal cross-check
  double dominance_J_factor = 2.0;
  bool cross_model = true;

  static Scenario parse(const std::string& json_text);
  static Scenario load(const std::filesystem::path& path);
  // Canonical JSON (sorted keys, all fields present).
  std::string to_json() const;

  RabData rab_data() const;
  RaqData raq_data() const;
  // (Delta, delta) cells of the solver sweep, in sweep order.
  std::vector<std::pair<double, double>> solver_cells() const;
  // Throws InvalidConfig describing the first problem found.
  void validate() const;
};

}  // namespace oralab
