#include "oralab/harness.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "oralab/error.hpp"
#include "oralab/metrics.hpp"
#include "oralab/version.hpp"

namespace oralab {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Task t) {
  switch (t) {
    case Task::Solve: return "solve";
    case Task::Simulate: return "simulate";
    case Task::CheckOra: return "check-ora";
    case Task::Compare: return "compare";
    case Task::Sweep: return "sweep";
  }
  return "?";
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void parallel_for(std::size_t jobs, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) return;
  const std::size_t workers = std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, jobs);
  std::vector<std::exception_ptr> errors(jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs || failed.load()) return;
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "run" : out;
}

BarrierOptions barrier_options(const Scenario& s) {
  BarrierOptions o;
  o.snapshot_stride = s.snapshot_stride;
  o.snapshot_times = s.snapshot_times;
  o.sub_steps = s.sub_steps;
  o.method = s.method;
  return o;
}

std::vector<double> probe_grid(const Scenario& s) {
  if (!s.r_grid.empty()) return s.r_grid;
  return default_r_grid(s.grid.x_min, s.grid.x_max, {}, s.r_count);
}

std::vector<double> barrier_r_grid(const Scenario& s) {
  if (!s.r_grid.empty()) return s.r_grid;
  // every breakpoint: covers the occupied support and every removal front
  const Grid g = s.grid.build();
  std::vector<double> r(g.n_cells() + 1);
  for (std::size_t k = 0; k <= g.n_cells(); ++k) r[k] = g.breakpoint(k);
  return r;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::Io, "cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  ~Csv() {
    out_.flush();
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string fmt(double x) { return format_number(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

// Collects warnings from every worker; strict mode turns them into errors.
class WarningSink {
 public:
  explicit WarningSink(bool strict)
      : guard_([this, strict](const Warning& w) {
          if (strict) {
            throw Error(ErrorCode::InvariantViolation,
                        std::string("strict mode: ") + to_string(w.kind) + ": " + w.message);
          }
          std::lock_guard<std::mutex> lock(mutex_);
          seen_.push_back(w);
        }) {}

  std::vector<Warning> sorted() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<Warning> v = seen_;
    std::sort(v.begin(), v.end(), [](const Warning& a, const Warning& b) {
      if (a.kind != b.kind) return a.kind < b.kind;
      if (a.message != b.message) return a.message < b.message;
      return a.value < b.value;
    });
    return v;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<Warning> seen_;
  ScopedWarningHandler guard_;
};

}  // namespace

std::vector<SolveCell> solve_sweep(const Scenario& s, const HarnessOptions& o) {
  const auto cells = s.solver_cells();
  if (cells.empty()) throw Error(ErrorCode::InvalidConfig, "config.solver.Delta: no solver cells");
  std::vector<SolveCell> out(cells.size());
  const BarrierOptions bo = barrier_options(s);
  const std::vector<double> r = barrier_r_grid(s);
  std::optional<RabData> rab;
  std::optional<RaqData> raq;
  if (s.model == Model::Rab) {
    rab = s.rab_data();
  } else {
    raq = s.raq_data();
  }
  parallel_for(cells.size(), o.threads, [&](std::size_t i) {
    SolveCell& c = out[i];
    c.Delta = cells[i].first;
    c.delta = cells[i].second;
    c.run_id = sanitize(s.name) + "_D" + fmt(c.Delta) + "_d" + fmt(c.delta);
    if (rab) {
      OraAccumulator acc(OraAccumulator::Model::Rab, r);
      c.run = solve_rab(*rab, c.Delta, c.delta, bo, acc.observer());
      c.ora = acc.rab();
    } else {
      OraAccumulator acc(OraAccumulator::Model::Raq, r, &raq->q);
      c.run = solve_raq(*raq, c.Delta, c.delta, bo, acc.observer());
      const OraRaqResidual res = acc.raq();
      c.ora = res.plus;
      c.ora_minus = res.minus;
    }
  });
  return out;
}

std::vector<SimCell> simulate_sweep(const Scenario& s, const HarnessOptions& o) {
  if (s.Ns.empty()) throw Error(ErrorCode::InvalidConfig, "config.simulation.N: no sizes");
  const std::uint64_t seed = o.seed.value_or(s.seed);
  std::vector<SimCell> out;
  for (std::size_t N : s.Ns) {
    for (std::size_t rep = 0; rep < s.replicas; ++rep) {
      SimCell c;
      c.N = N;
      c.replica = rep;
      c.seed = seed;
      c.run_id = sanitize(s.name) + "_N" + fmt(N) + "_r" + fmt(rep);
      out.push_back(std::move(c));
    }
  }
  const std::vector<double> probes = probe_grid(s);
  std::optional<RabData> rab;
  std::optional<RaqData> raq;
  if (s.model == Model::Rab) {
    rab = s.rab_data();
  } else {
    raq = s.raq_data();
  }
  parallel_for(out.size(), o.threads, [&](std::size_t i) {
    SimCell& c = out[i];
    SimulationOptions so;
    so.N = c.N;
    so.replica = c.replica;
    so.seed = c.seed;
    so.snapshot_times = s.snapshot_times;
    so.probe_r = probes;
    so.throw_on_violation = false;
    if (rab) {
      c.trace = simulate_rab(*rab, so);
      c.ora = ora_residual_trace_rab(c.trace);
    } else {
      c.trace = simulate_raq(*raq, so);
      const OraRaqResidual res = ora_residual_trace_raq(c.trace, raq->q);
      c.ora = res.plus;
      c.ora_minus = res.minus;
    }
  });
  return out;
}

ComparisonReport compare(const SolveCell& reference, const std::vector<SimCell>& sims) {
  ComparisonReport rep;
  std::map<std::pair<std::size_t, double>, std::vector<std::pair<double, double>>> groups;
  std::map<double, DensityGrid> mids;
  for (const SimCell& c : sims) {
    for (std::size_t k = 0; k < c.trace.snapshot_times.size(); ++k) {
      const double t = c.trace.snapshot_times[k];
      auto it = mids.find(t);
      if (it == mids.end()) {
        std::size_t step;
        try {
          step = reference.run.step_of(t);
        } catch (const Error&) {
          continue;
        }
        const auto snap = std::find_if(reference.run.snapshots.begin(),
                                       reference.run.snapshots.end(),
                                       [&](const BarrierSnapshot& s) { return s.n == step; });
        if (snap == reference.run.snapshots.end()) continue;
        it = mids.emplace(t, snap->mid()).first;
      }
      const EmpiricalTail tail(c.trace.snapshots[k], static_cast<double>(c.N));
      ConvergenceRow row;
      row.run_id = c.run_id;
      row.N = c.N;
      row.replica = c.replica;
      row.seed = c.seed;
      row.t = t;
      row.sup_dist = tail_sup_distance(tail, it->second);
      row.levy = levy_distance(tail, it->second);
      groups[{c.N, t}].emplace_back(row.sup_dist, row.levy);
      rep.convergence.push_back(std::move(row));
    }
  }
  for (const auto& [key, vals] : groups) {
    ComparisonRow row;
    row.reference = reference.run_id;
    row.N = key.first;
    row.t = key.second;
    row.replicas = vals.size();
    double s1 = 0.0, l1 = 0.0;
    for (const auto& [a, b] : vals) {
      s1 += a;
      l1 += b;
    }
    const double n = static_cast<double>(vals.size());
    row.mean_sup = s1 / n;
    row.mean_levy = l1 / n;
    if (vals.size() > 1) {
      double s2 = 0.0, l2 = 0.0;
      for (const auto& [a, b] : vals) {
        s2 += (a - row.mean_sup) * (a - row.mean_sup);
        l2 += (b - row.mean_levy) * (b - row.mean_levy);
      }
      row.std_sup = std::sqrt(s2 / (n - 1.0));
      row.std_levy = std::sqrt(l2 / (n - 1.0));
    }
    const std::size_t step = reference.run.step_of(row.t);
    row.gap_bound = reference.run.gap_bound[step];
    row.measured_gap = reference.run.measured_gap[step];
    rep.rows.push_back(row);
  }
  return rep;
}

ComparisonReport compare_models(const Scenario& s, const HarnessOptions& o) {
  Scenario first = s;
  const auto cells = s.solver_cells();
  if (cells.empty()) throw Error(ErrorCode::InvalidConfig, "config.solver.Delta: no solver cells");
  first.Deltas = {cells.front().first};
  first.deltas = {cells.front().second};
  const std::vector<SolveCell> solved = solve_sweep(first, o);
  ComparisonReport rep = compare(solved.front(), simulate_sweep(s, o));
  paired_checks(s, solved.front(), o, rep);
  return rep;
}

void paired_checks(const Scenario& s, const SolveCell& reference, const HarnessOptions& o,
                   ComparisonReport& rep) {
  const BarrierOptions bo = barrier_options(s);
  if (s.model == Model::Rab && s.dominance_J_factor > 0.0) {
    const RabData a = s.rab_data();
    RabData b = a;
    b.J = CumulativeSchedule::scaled(a.J, s.dominance_J_factor);
    std::string why;
    try {
      b.validate();
    } catch (const Error& e) {
      why = e.what();
    }
    if (!why.empty()) {
      rep.notes.push_back("dominance skipped: paired data invalid: " + why);
    } else {
      const BarrierRun ra = solve_rab_lower(a, reference.delta, bo);
      const BarrierRun rb = solve_rab_lower(b, reference.delta, bo);
      for (std::size_t k = 0; k < ra.snapshots.size() && k < rb.snapshots.size(); ++k) {
        rep.dominance.push_back(DominanceRow{
            reference.run_id, ra.snapshots[k].t,
            max_tail_excess(rb.snapshots[k].lower, ra.snapshots[k].lower)});
      }
      const std::uint64_t seed = o.seed.value_or(s.seed);
      const double eps = b.epsilon0();
      for (std::size_t N : s.Ns) {
        if (static_cast<double>(N) * eps - 1.0 < 1.0) {
          rep.notes.push_back("coupled run skipped for N=" + fmt(N) + ": paired population too small");
          continue;
        }
        for (std::size_t r = 0; r < s.replicas; ++r) {
          rep.coupled.push_back(CoupledRow{sanitize(s.name) + "_pair_N" + fmt(N) + "_r" + fmt(r),
                                           N, r, seed, 0, 0});
        }
      }
      parallel_for(rep.coupled.size(), o.threads, [&](std::size_t i) {
        CoupledRow& row = rep.coupled[i];
        SimulationOptions so;
        so.N = row.N;
        so.replica = row.replica;
        so.seed = row.seed;
        so.throw_on_violation = false;
        const CoupledTrace c = simulate_coupled_rab(a, b, so);
        row.checks = c.dominance_checks;
        row.violations = c.dominance_violations;
      });
    }
  }
  if (s.model == Model::Raq && s.cross_model) {
    const RaqData q = s.raq_data();
    if (!q.q.identically_zero()) {
      rep.notes.push_back("cross-model check skipped: q is not identically zero");
      return;
    }
    RabData b{q.u0, InjectionSchedule{}, CumulativeSchedule::linear(1.0), q.horizon};
    const BarrierRun rb = solve_rab(b, reference.Delta, reference.delta, bo);
    const BarrierRun& ra = reference.run;
    for (std::size_t k = 0; k < ra.snapshots.size() && k < rb.snapshots.size(); ++k) {
      const BarrierSnapshot& x = ra.snapshots[k];
      const BarrierSnapshot& y = rb.snapshots[k];
      rep.cross_model.push_back(CrossModelRow{
          reference.run_id, x.t, tail_sup_distance(x.mid(), y.mid()),
          tail_sup_distance(x.lower, y.lower), tail_sup_distance(x.upper, y.upper),
          ra.gap_bound[x.n] + rb.gap_bound[y.n]});
    }
  }
}

// ---------------------------------------------------------------------------
// output

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << x;
  return os.str();
}

struct Writer {
  fs::path dir;
  const Scenario& s;
  std::vector<std::string> files;

  fs::path open(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }

  void density(const std::vector<SolveCell>& cells) {
    for (double t : s.snapshot_times) {
      Csv csv(open("density_t" + fmt(t) + ".csv"), {"run_id", "x", "lower", "upper", "mid"});
      for (const SolveCell& c : cells) {
        const BarrierSnapshot& snap = c.run.at_time(t);
        const Grid& g = snap.lower.grid();
        for (std::size_t i = 0; i < g.n_cells(); ++i) {
          const double lo = snap.lower[i];
          const double up = snap.upper[i];
          csv.row({c.run_id, fmt(g.center(i)), fmt(lo), fmt(up), fmt(0.5 * (lo + up))});
        }
      }
    }
  }

  void gap(const std::vector<SolveCell>& cells) {
    Csv csv(open("gap.csv"), {"run_id", "t", "bound", "measured", "certified", "lower_mass",
                              "upper_mass", "error_slab_mass"});
    for (const SolveCell& c : cells) {
      const BarrierRun& r = c.run;
      for (std::size_t n = 0; n < r.times.size(); ++n) {
        csv.row({c.run_id, fmt(r.times[n]), fmt(r.gap_bound[n]), fmt(r.measured_gap[n]),
                 r.certified[n] ? "1" : "0", fmt(r.lower_mass[n]), fmt(r.upper_mass[n]),
                 fmt(r.error_slab_mass[n])});
      }
    }
  }

  void removal(const std::vector<SolveCell>& cells, const std::vector<SimCell>& sims) {
    Csv csv(open("removal.csv"), {"run_id", "branch", "t", "x_lo", "x_hi", "mass"});
    for (const SolveCell& c : cells) {
      for (const auto* m : {&c.run.removal_lower, &c.run.removal_upper}) {
        const char* branch = m == &c.run.removal_lower ? "lower" : "upper";
        for (const auto& e : m->entries()) {
          if (!(e.mass > 0.0)) continue;
          const auto [a, b] = RemovalMeasure::entry_support(e);
          csv.row({c.run_id, branch, fmt(e.time), fmt(a), fmt(b), fmt(e.mass)});
        }
      }
    }
    if (!s.emit.traces) return;
    for (const SimCell& c : sims) {
      const std::string w = fmt(1.0 / static_cast<double>(c.N));
      for (const RemovalEvent& e : c.trace.removals) {
        csv.row({c.run_id, "particles", fmt(e.time), fmt(e.position), fmt(e.position), w});
      }
    }
  }

  void ora(const std::vector<SolveCell>& cells, const std::vector<SimCell>& sims) {
    Csv csv(open("ora.csv"), {"run_id", "kind", "r", "residual"});
    const bool raq = s.model == Model::Raq;
    const auto emit = [&](const std::string& id, const OraResidual& res, const char* kind) {
      for (std::size_t k = 0; k < res.r.size(); ++k) {
        csv.row({id, kind, fmt(res.r[k]), fmt(res.residual[k])});
      }
    };
    for (const SolveCell& c : cells) {
      emit(c.run_id, c.ora, raq ? "raq_plus" : "rab");
      if (raq) emit(c.run_id, c.ora_minus, "raq_minus");
    }
    for (const SimCell& c : sims) {
      emit(c.run_id, c.ora, raq ? "raq_plus" : "rab");
      if (raq) emit(c.run_id, c.ora_minus, "raq_minus");
    }
  }

  void simulations(const std::vector<SimCell>& sims) {
    Csv csv(open("simulations.csv"), {"run_id", "N", "replica", "seed", "removals", "injections",
                                      "ora_violations", "ora_max"});
    for (const SimCell& c : sims) {
      csv.row({c.run_id, fmt(c.N), fmt(c.replica), std::to_string(c.seed),
               fmt(c.trace.removals.size()), fmt(c.trace.injections),
               fmt(c.trace.ora_violations), fmt(std::max(c.ora.max, c.ora_minus.max))});
    }
    if (!s.emit.traces) return;
    for (const SimCell& c : sims) {
      Csv t(open("trace_" + c.run_id + ".csv"), {"kind", "t", "x", "label"});
      for (const RemovalEvent& e : c.trace.removals) {
        t.row({"removal", fmt(e.time), fmt(e.position), std::to_string(e.label)});
      }
      for (std::size_t k = 0; k < c.trace.snapshot_times.size(); ++k) {
        for (double x : c.trace.snapshots[k]) {
          t.row({"snapshot", fmt(c.trace.snapshot_times[k]), fmt(x), ""});
        }
      }
    }
  }

  void comparison(const ComparisonReport& rep) {
    {
      Csv csv(open("convergence.csv"), {"run_id", "N", "replica", "seed", "t", "sup_dist", "levy"});
      for (const ConvergenceRow& r : rep.convergence) {
        csv.row({r.run_id, fmt(r.N), fmt(r.replica), std::to_string(r.seed), fmt(r.t),
                 fmt(r.sup_dist), fmt(r.levy)});
      }
    }
    Csv csv(open("comparison.csv"), {"reference", "N", "t", "replicas", "mean_sup", "std_sup",
                                     "mean_levy", "std_levy", "gap_bound", "measured_gap"});
    for (const ComparisonRow& r : rep.rows) {
      csv.row({r.reference, fmt(r.N), fmt(r.t), fmt(r.replicas), fmt(r.mean_sup), fmt(r.std_sup),
               fmt(r.mean_levy), fmt(r.std_levy), fmt(r.gap_bound), fmt(r.measured_gap)});
    }
  }

  void paired(const ComparisonReport& rep) {
    if (!rep.dominance.empty()) {
      Csv csv(open("dominance.csv"), {"run_id", "t", "excess"});
      for (const DominanceRow& r : rep.dominance) csv.row({r.run_id, fmt(r.t), fmt(r.excess)});
    }
    if (!rep.coupled.empty()) {
      Csv csv(open("coupled.csv"), {"run_id", "N", "replica", "seed", "checks", "violations"});
      for (const CoupledRow& r : rep.coupled) {
        csv.row({r.run_id, fmt(r.N), fmt(r.replica), std::to_string(r.seed), fmt(r.checks),
                 fmt(r.violations)});
      }
    }
    if (!rep.cross_model.empty()) {
      Csv csv(open("cross_model.csv"), {"run_id", "t", "mid", "lower", "upper", "bound"});
      for (const CrossModelRow& r : rep.cross_model) {
        csv.row({r.run_id, fmt(r.t), fmt(r.mid), fmt(r.lower), fmt(r.upper), fmt(r.bound)});
      }
    }
  }

  void warnings(const std::vector<Warning>& ws) {
    Csv csv(open("warnings.csv"), {"kind", "value", "message"});
    for (const Warning& w : ws) {
      std::string msg = w.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      csv.row({to_string(w.kind), fmt(w.value), msg});
    }
  }
};

}  // namespace

fs::path run_scenario(const Scenario& s, Task task, const HarnessOptions& o) {
  WarningSink sink(o.strict);
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + o.out_dir.string() + ": " + ec.message());

  const bool solve = task != Task::Simulate;
  const bool simulate = task != Task::Solve && (task != Task::CheckOra || !s.Ns.empty());
  std::vector<SolveCell> cells;
  std::vector<SimCell> sims;
  if (solve) cells = solve_sweep(s, o);
  if (simulate) sims = simulate_sweep(s, o);

  Writer w{o.out_dir, s, {}};
  if (task == Task::Solve || task == Task::Sweep) {
    if (s.emit.density) w.density(cells);
    if (s.emit.gap) w.gap(cells);
  }
  if (task != Task::CheckOra && s.emit.removal && (!cells.empty() || s.emit.traces)) {
    w.removal(cells, sims);
  }
  if (s.emit.ora || task == Task::CheckOra) w.ora(cells, sims);
  if (!sims.empty() && task != Task::CheckOra) w.simulations(sims);
  std::vector<std::string> notes;
  if ((task == Task::Compare || task == Task::Sweep) && s.emit.convergence) {
    ComparisonReport rep = compare(cells.front(), sims);
    paired_checks(s, cells.front(), o, rep);
    w.comparison(rep);
    w.paired(rep);
    notes = rep.notes;
    if (task == Task::Compare && s.emit.gap) {
      w.gap({cells.front()});
    }
  }
  w.warnings(sink.sorted());

  json manifest;
  manifest["schema"] = Scenario::kSchema;
  manifest["tool"] = "oralab";
  manifest["version"] = ORALAB_VERSION_STRING;
  manifest["fftw"] = std::string(fftw_version);
  manifest["task"] = to_string(task);
  const std::string canonical = s.to_json();
  manifest["config_hash"] = "fnv1a64:" + hex(fnv1a(canonical));
  manifest["config"] = json::parse(canonical);
  manifest["seed"] = o.seed.value_or(s.seed);
  json jc = json::array();
  for (const SolveCell& c : cells) {
    jc.push_back(json{{"run_id", c.run_id}, {"kind", "barrier"}, {"Delta", c.Delta},
                      {"delta", c.delta}, {"steps", c.run.steps}});
  }
  for (const SimCell& c : sims) {
    jc.push_back(json{{"run_id", c.run_id}, {"kind", "particles"}, {"N", c.N},
                      {"replica", c.replica}, {"seed", c.seed}});
  }
  manifest["cells"] = jc;
  manifest["notes"] = notes;

  manifest["files"] = w.files;
  std::ofstream(o.out_dir / "manifest.json", std::ios::binary | std::ios::trunc)
      << manifest.dump(2) << '\n';
  if (s.emit.plots && (task == Task::Sweep || task == Task::Solve || task == Task::Compare)) {
    emit_plots(o.out_dir);
  }
  return o.out_dir;
}

fs::path run_scenario(const fs::path& config, Task task, const HarnessOptions& o) {
  return run_scenario(Scenario::load(config), task, o);
}

// ---------------------------------------------------------------------------
// plot tables

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name,
                   const fs::path& p) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::Io, p.string() + " lacks column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

void emit_plots(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw Error(ErrorCode::Io, run_dir.string() + " is not a directory");

  // density profiles, long format
  std::vector<fs::path> densities;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("density_t", 0) == 0 && entry.path().extension() == ".csv") {
      densities.push_back(entry.path());
    }
  }
  std::sort(densities.begin(), densities.end());
  if (!densities.empty()) {
    Csv out(run_dir / "plot_density.csv", {"run_id", "t", "x", "series", "value"});
    for (const fs::path& p : densities) {
      std::string t = p.stem().string().substr(9);
      const auto rows = read_csv(p);
      if (rows.empty()) continue;
      const auto& h = rows.front();
      const std::size_t cid = column(h, "run_id", p), cx = column(h, "x", p);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        for (const char* series : {"lower", "upper", "mid"}) {
          const std::size_t c = column(h, series, p);
          out.row({rows[i][cid], t, rows[i][cx], series, rows[i][c]});
        }
      }
    }
  }

  // tail gaps against (Delta, delta)
  const fs::path manifest_path = run_dir / "manifest.json";
  std::map<std::string, std::pair<std::string, std::string>> params;
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    json m = json::parse(in, nullptr, false);
    if (!m.is_discarded() && m.contains("cells")) {
      for (const json& c : m["cells"]) {
        if (c.value("kind", "") != "barrier") continue;
        params[c.value("run_id", "")] = {format_number(c.value("Delta", 0.0)),
                                         format_number(c.value("delta", 0.0))};
      }
    }
  }
  if (fs::exists(run_dir / "gap.csv")) {
    const fs::path p = run_dir / "gap.csv";
    const auto rows = read_csv(p);
    Csv out(run_dir / "plot_gap.csv", {"run_id", "Delta", "delta", "t", "bound", "measured"});
    if (!rows.empty()) {
      const auto& h = rows.front();
      const std::size_t cid = column(h, "run_id", p), ct = column(h, "t", p),
                        cb = column(h, "bound", p), cm = column(h, "measured", p);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto it = params.find(rows[i][cid]);
        const std::string D = it == params.end() ? "" : it->second.first;
        const std::string d = it == params.end() ? "" : it->second.second;
        out.row({rows[i][cid], D, d, rows[i][ct], rows[i][cb], rows[i][cm]});
      }
    }
  }

  // sup distance against N on log scales
  if (fs::exists(run_dir / "comparison.csv")) {
    const fs::path p = run_dir / "comparison.csv";
    const auto rows = read_csv(p);
    Csv out(run_dir / "plot_convergence.csv",
            {"N", "t", "log10_N", "mean_sup", "log10_mean_sup", "std_sup", "mean_levy"});
    if (!rows.empty()) {
      const auto& h = rows.front();
      const std::size_t cN = column(h, "N", p), ct = column(h, "t", p),
                        cm = column(h, "mean_sup", p), cs = column(h, "std_sup", p),
                        cl = column(h, "mean_levy", p);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const double N = std::stod(rows[i][cN]);
        const double m = std::stod(rows[i][cm]);
        out.row({rows[i][cN], rows[i][ct], format_number(std::log10(N)), rows[i][cm],
                 m > 0.0 ? format_number(std::log10(m)) : "", rows[i][cs], rows[i][cl]});
      }
    }
  }
}

}  // namespace oralab
