#include "oralab/oralab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "oralab/error.hpp"
#include "oralab/harness.hpp"
#include "oralab/presets.hpp"
#include "oralab/raq_barriers.hpp"
#include "oralab/rab_barriers.hpp"
#include "oralab/scenario.hpp"
#include "oralab/version.hpp"

struct oralab_scenario {
  oralab::Scenario s;
};

struct oralab_barrier {
  oralab::BarrierRun run;
};

struct oralab_preset_result {
  oralab::PresetResult r;
};

namespace {

thread_local std::string g_last_error;

oralab_status status_of(oralab::ErrorCode c) {
  // enum orders match; the table keeps that explicit
  switch (c) {
    case oralab::ErrorCode::InvalidArgument: return ORALAB_E_INVALID_ARGUMENT;
    case oralab::ErrorCode::GridMismatch: return ORALAB_E_GRID_MISMATCH;
    case oralab::ErrorCode::InsufficientMass: return ORALAB_E_INSUFFICIENT_MASS;
    case oralab::ErrorCode::InfeasibleCut: return ORALAB_E_INFEASIBLE_CUT;
    case oralab::ErrorCode::DeltaTooLarge: return ORALAB_E_DELTA_TOO_LARGE;
    case oralab::ErrorCode::SandwichViolation: return ORALAB_E_SANDWICH_VIOLATION;
    case oralab::ErrorCode::ValidityWindowExceeded: return ORALAB_E_VALIDITY_WINDOW_EXCEEDED;
    case oralab::ErrorCode::PopulationUnderflow: return ORALAB_E_POPULATION_UNDERFLOW;
    case oralab::ErrorCode::CouplingPreconditionViolated: return ORALAB_E_COUPLING_PRECONDITION;
    case oralab::ErrorCode::NoSnapshotAtTime: return ORALAB_E_NO_SNAPSHOT_AT_TIME;
    case oralab::ErrorCode::SupportEscapesGrid: return ORALAB_E_SUPPORT_ESCAPES_GRID;
    case oralab::ErrorCode::EmptyWindow: return ORALAB_E_EMPTY_WINDOW;
    case oralab::ErrorCode::InvalidConfig: return ORALAB_E_INVALID_CONFIG;
    case oralab::ErrorCode::InvariantViolation: return ORALAB_E_INVARIANT_VIOLATION;
    case oralab::ErrorCode::Io: return ORALAB_E_IO;
  }
  return ORALAB_E_INTERNAL;
}

template <class F>
oralab_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ORALAB_OK;
  } catch (const oralab::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ORALAB_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ORALAB_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return ORALAB_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw oralab::Error(oralab::ErrorCode::InvalidArgument, what);
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

oralab::Task task_of(oralab_task t) {
  switch (t) {
    case ORALAB_TASK_SOLVE: return oralab::Task::Solve;
    case ORALAB_TASK_SIMULATE: return oralab::Task::Simulate;
    case ORALAB_TASK_CHECK_ORA: return oralab::Task::CheckOra;
    case ORALAB_TASK_COMPARE: return oralab::Task::Compare;
    case ORALAB_TASK_SWEEP: return oralab::Task::Sweep;
  }
  throw oralab::Error(oralab::ErrorCode::InvalidArgument, "unknown task");
}

}  // namespace

extern "C" {

const char* oralab_version(void) { return ORALAB_VERSION_STRING; }

const char* oralab_status_name(oralab_status status) {
  switch (status) {
    case ORALAB_OK: return "ok";
    case ORALAB_E_INTERNAL: return "internal";
    default: break;
  }
  const int k = static_cast<int>(status);
  if (k >= 1 && k <= 15) return oralab::to_string(static_cast<oralab::ErrorCode>(k - 1));
  return "unknown";
}

const char* oralab_last_error(void) { return g_last_error.c_str(); }

void oralab_string_free(char* s) { std::free(s); }

oralab_status oralab_scenario_load(const char* path, oralab_scenario** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new oralab_scenario{oralab::Scenario::load(path)};
  });
}

oralab_status oralab_scenario_parse(const char* json, oralab_scenario** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new oralab_scenario{oralab::Scenario::parse(json)};
  });
}

oralab_status oralab_scenario_preset(const char* name, oralab_scenario** out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = new oralab_scenario{oralab::preset_scenario(name)};
  });
}

oralab_status oralab_scenario_to_json(const oralab_scenario* s, char** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = dup(s->s.to_json());
  });
}

oralab_status oralab_scenario_model(const oralab_scenario* s, oralab_model* out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = s->s.model == oralab::Model::Rab ? ORALAB_MODEL_RAB : ORALAB_MODEL_RAQ;
  });
}

void oralab_scenario_free(oralab_scenario* s) { delete s; }

void oralab_run_options_init(oralab_run_options* o) {
  if (!o) return;
  o->out_dir = nullptr;
  o->threads = 1;
  o->has_seed = 0;
  o->seed = 0;
  o->strict = 0;
}

oralab_status oralab_run(const oralab_scenario* s, oralab_task task, const oralab_run_options* o,
                         char** out_dir) {
  return guarded([&] {
    require(s != nullptr, "null scenario");
    oralab::HarnessOptions h;
    if (o) {
      if (o->out_dir) h.out_dir = o->out_dir;
      h.threads = o->threads == 0 ? 1 : o->threads;
      if (o->has_seed) h.seed = o->seed;
      h.strict = o->strict != 0;
    }
    const auto dir = oralab::run_scenario(s->s, task_of(task), h);
    if (out_dir) *out_dir = dup(dir.string());
  });
}

oralab_status oralab_emit_plots(const char* run_dir) {
  return guarded([&] {
    require(run_dir != nullptr, "null argument");
    oralab::emit_plots(run_dir);
  });
}

oralab_status oralab_barrier_solve(const oralab_scenario* s, double Delta, double delta,
                                   oralab_barrier** out) {
  return guarded([&] {
    require(s && out, "null argument");
    oralab::BarrierOptions bo;
    bo.snapshot_times = s->s.snapshot_times;
    bo.snapshot_stride = s->s.snapshot_stride;
    bo.sub_steps = s->s.sub_steps;
    bo.method = s->s.method;
    auto* b = new oralab_barrier;
    try {
      b->run = s->s.model == oralab::Model::Rab
                   ? oralab::solve_rab(s->s.rab_data(), Delta, delta, bo)
                   : oralab::solve_raq(s->s.raq_data(), Delta, delta, bo);
    } catch (...) {
      delete b;
      throw;
    }
    *out = b;
  });
}

size_t oralab_barrier_steps(const oralab_barrier* b) { return b ? b->run.steps : 0; }

oralab_status oralab_barrier_gap(const oralab_barrier* b, size_t n, double* bound,
                                 double* measured) {
  return guarded([&] {
    require(b != nullptr, "null barrier");
    require(n <= b->run.steps, "step out of range");
    if (bound) *bound = b->run.gap_bound[n];
    if (measured) *measured = b->run.measured_gap[n];
  });
}

oralab_status oralab_barrier_mass(const oralab_barrier* b, size_t n, double* lower,
                                  double* upper) {
  return guarded([&] {
    require(b != nullptr, "null barrier");
    require(n <= b->run.steps, "step out of range");
    if (lower) *lower = b->run.lower_mass[n];
    if (upper) *upper = b->run.upper_mass[n];
  });
}

oralab_status oralab_barrier_tail(const oralab_barrier* b, double t, oralab_branch branch,
                                  double r, double* out) {
  return guarded([&] {
    require(b && out, "null argument");
    const oralab::BarrierSnapshot& snap = b->run.at_time(t);
    switch (branch) {
      case ORALAB_LOWER: *out = oralab::tail_of(snap.lower)(r); break;
      case ORALAB_UPPER: *out = oralab::tail_of(snap.upper)(r); break;
      case ORALAB_MID: *out = oralab::tail_of(snap.mid())(r); break;
      default: require(false, "unknown branch");
    }
  });
}

void oralab_barrier_free(oralab_barrier* b) { delete b; }

size_t oralab_preset_count(void) { return oralab::preset_list().size(); }

oralab_status oralab_preset_info(size_t index, int* id, const char** name, const char** summary) {
  return guarded([&] {
    const auto& list = oralab::preset_list();
    require(index < list.size(), "preset index out of range");
    if (id) *id = list[index].id;
    if (name) *name = list[index].name;
    if (summary) *summary = list[index].summary;
  });
}

oralab_status oralab_preset_run(const char* name, unsigned threads, uint64_t seed,
                                oralab_preset_result** out) {
  return guarded([&] {
    require(name && out, "null argument");
    oralab::PresetOptions po;
    po.threads = threads == 0 ? 1 : threads;
    if (seed != 0) po.seed = seed;
    *out = new oralab_preset_result{oralab::run_preset(name, po)};
  });
}

int oralab_preset_result_passed(const oralab_preset_result* r) { return r && r->r.passed ? 1 : 0; }
int oralab_preset_result_id(const oralab_preset_result* r) { return r ? r->r.id : 0; }
const char* oralab_preset_result_name(const oralab_preset_result* r) {
  return r ? r->r.name.c_str() : "";
}
double oralab_preset_result_seconds(const oralab_preset_result* r) { return r ? r->r.seconds : 0.0; }
size_t oralab_preset_result_warnings(const oralab_preset_result* r) {
  return r ? r->r.warnings : 0;
}
size_t oralab_preset_result_detail_count(const oralab_preset_result* r) {
  return r ? r->r.details.size() : 0;
}
const char* oralab_preset_result_detail(const oralab_preset_result* r, size_t i) {
  return r && i < r->r.details.size() ? r->r.details[i].c_str() : "";
}
void oralab_preset_result_free(oralab_preset_result* r) { delete r; }

}  // extern "C"
