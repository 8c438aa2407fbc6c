#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oralab/barrier.hpp"
#include "oralab/ora_diagnostics.hpp"
#include "oralab/particle_lab.hpp"
#include "oralab/scenario.hpp"

namespace oralab {

struct HarnessOptions {
  std::filesystem::path out_dir = "run";
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool strict = false;                // warnings become errors
};

enum class Task {
  Solve,     // barrier sweep over (Delta, delta)
  Simulate,  // particle sweep over (N, replica)
  CheckOra,  // ORA residuals of barriers and traces
  Compare,   // barrier vs simulation tables
  Sweep,     // all of the above
};

const char* to_string(Task t);

// Runs fn(0..jobs-1) on at most `threads` workers. Exceptions are collected
// and the one from the lowest job index is rethrown after all workers stop.
void parallel_for(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& fn);

struct SolveCell {
  std::string run_id;
  double Delta = 0.0;
  double delta = 0.0;
  BarrierRun run;
  OraResidual ora;     // RAB, or RAQ I+
  OraResidual ora_minus;  // RAQ I-
};

struct SimCell {
  std::string run_id;
  std::size_t N = 0;
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  EmpiricalTrace trace;
  OraResidual ora;
  OraResidual ora_minus;
};

struct ComparisonRow {
  std::string reference;  // solver run id
  std::size_t N = 0;
  double t = 0.0;
  std::size_t replicas = 0;
  double mean_sup = 0.0, std_sup = 0.0;
  double mean_levy = 0.0, std_levy = 0.0;
  double gap_bound = 0.0;
  double measured_gap = 0.0;
};

struct ConvergenceRow {
  std::string run_id;
  std::size_t N = 0;
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  double t = 0.0;
  double sup_dist = 0.0;
  double levy = 0.0;
};

// Barrier-level dominance of the paired (J scaled) scenario: sup_r of the
// paired lower tail minus the reference lower tail; 0 means dominated.
struct DominanceRow {
  std::string run_id;
  double t = 0.0;
  double excess = 0.0;
};

struct CoupledRow {
  std::string run_id;
  std::size_t N = 0;
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
};

// RAQ with q == 0 against boundary removal with I = 0 and J = t.
struct CrossModelRow {
  std::string run_id;
  double t = 0.0;
  double mid = 0.0, lower = 0.0, upper = 0.0;
  double bound = 0.0;  // sum of both gap bounds
};

struct ComparisonReport {
  std::vector<ConvergenceRow> convergence;
  std::vector<ComparisonRow> rows;
  std::vector<DominanceRow> dominance;
  std::vector<CoupledRow> coupled;
  std::vector<CrossModelRow> cross_model;
  std::vector<std::string> notes;  // checks that were skipped and why
};

std::vector<SolveCell> solve_sweep(const Scenario& s, const HarnessOptions& o);
std::vector<SimCell> simulate_sweep(const Scenario& s, const HarnessOptions& o);

// Empirical tails of each trace against the barrier mid of `reference` at
// every snapshot time both share.
ComparisonReport compare(const SolveCell& reference, const std::vector<SimCell>& sims);
// Dominance and cross-model tables for the scenario, appended to rep;
// `reference` fixes Delta and delta.
void paired_checks(const Scenario& s, const SolveCell& reference, const HarnessOptions& o,
                   ComparisonReport& rep);
// Solves the first (Delta, delta) cell, simulates all (N, replica) cells and
// runs the paired checks.
ComparisonReport compare_models(const Scenario& s, const HarnessOptions& o);

// Executes the task and writes manifest.json plus the CSV tables into
// o.out_dir. Returns the output directory.
std::filesystem::path run_scenario(const Scenario& s, Task task, const HarnessOptions& o);
std::filesystem::path run_scenario(const std::filesystem::path& config, Task task,
                                   const HarnessOptions& o);

// Long-format plot tables derived from the CSVs of a run directory.
void emit_plots(const std::filesystem::path& run_dir);

// Shortest round-trip decimal form; used for every number written.
std::string format_number(double x);

}  // namespace oralab
