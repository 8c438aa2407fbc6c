#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oralab/scenario.hpp"

namespace oralab {

// Pass/fail thresholds of the named presets. Checkers only report numbers;
// the comparisons against these live in the preset runners.
struct PresetThresholds {
  std::size_t operator_trials = 10000;
  double operator_seconds = 30.0;
  double ledger_relative = 1e-10;
  double sandwich_seconds = 60.0;
  double convergence_ratio = 1.5;
  double hydro_slack = 0.02;
  double hydro_std_factor = 3.0;
  double hydro_seconds = 300.0;
  double cross_model_slack = 1e-6;
  double skorohod_barrier_factor = 2.0;  // times the per-step removal mass
  double skorohod_trace_factor = 3.0;    // times 1/N
  double weak_form_C = 3.0;              // frozen regression constant
  double weak_form_heat = 1e-6;
};

struct PresetOptions {
  unsigned threads = 1;
  std::uint64_t seed = 20240601;
  PresetThresholds thresholds;
};

struct PresetResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::vector<std::string> details;
  double seconds = 0.0;
  std::size_t warnings = 0;
};

struct PresetInfo {
  int id;
  const char* name;
  const char* summary;
};

const std::vector<PresetInfo>& preset_list();
// Throws InvalidArgument for an unknown name.
PresetResult run_preset(const std::string& name, const PresetOptions& options = {});

// Reference scenarios: "rab-preset" and "raq-preset".
Scenario preset_scenario(const std::string& name);

}  // namespace oralab
