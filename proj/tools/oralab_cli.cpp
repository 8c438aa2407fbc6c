// Command line front end; talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oralab/oralab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitConfig = 3;

int exit_code(oralab_status s) {
  switch (s) {
    case ORALAB_OK: return kExitOk;
    case ORALAB_E_INVALID_CONFIG: return kExitConfig;
    case ORALAB_E_SANDWICH_VIOLATION:
    case ORALAB_E_INVARIANT_VIOLATION:
    case ORALAB_E_POPULATION_UNDERFLOW:
    case ORALAB_E_COUPLING_PRECONDITION: return kExitInvariant;
    default: return kExitFailure;
  }
}

int report(oralab_status s) {
  if (s != ORALAB_OK) {
    std::cerr << "oralab: " << oralab_status_name(s) << ": " << oralab_last_error() << '\n';
  }
  return exit_code(s);
}

struct Globals {
  std::string config;
  std::string out_dir = "run";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool strict = false;
};

class Scenario {
 public:
  ~Scenario() { oralab_scenario_free(p_); }
  oralab_status load(const std::string& path) { return oralab_scenario_load(path.c_str(), &p_); }
  oralab_scenario* get() const { return p_; }

 private:
  oralab_scenario* p_ = nullptr;
};

int run_task(const Globals& g, oralab_task task, std::optional<oralab_model> model) {
  if (g.config.empty()) {
    std::cerr << "oralab: --config is required for this command\n";
    return kExitConfig;
  }
  Scenario sc;
  if (oralab_status s = sc.load(g.config); s != ORALAB_OK) return report(s);
  if (model) {
    oralab_model m;
    oralab_scenario_model(sc.get(), &m);
    if (m != *model) {
      std::cerr << "oralab: config model is " << (m == ORALAB_MODEL_RAB ? "rab" : "raq")
                << " but the command expects " << (*model == ORALAB_MODEL_RAB ? "rab" : "raq")
                << '\n';
      return kExitConfig;
    }
  }
  oralab_run_options o;
  oralab_run_options_init(&o);
  o.out_dir = g.out_dir.c_str();
  o.threads = g.threads;
  o.has_seed = g.seed.has_value();
  o.seed = g.seed.value_or(0);
  o.strict = g.strict;
  char* dir = nullptr;
  const oralab_status s = oralab_run(sc.get(), task, &o, &dir);
  if (s == ORALAB_OK) {
    std::cout << dir << '\n';
    oralab_string_free(dir);
  }
  return report(s);
}

int presets_list() {
  for (std::size_t i = 0; i < oralab_preset_count(); ++i) {
    int id = 0;
    const char* name = nullptr;
    const char* summary = nullptr;
    oralab_preset_info(i, &id, &name, &summary);
    std::printf("%2d  %-17s %s\n", id, name, summary);
  }
  return kExitOk;
}

int presets_run(const Globals& g, std::vector<std::string> names) {
  if (names.empty() || (names.size() == 1 && names[0] == "all")) {
    names.clear();
    for (std::size_t i = 0; i < oralab_preset_count(); ++i) {
      const char* name = nullptr;
      oralab_preset_info(i, nullptr, &name, nullptr);
      names.emplace_back(name);
    }
  }
  int rc = kExitOk;
  for (const std::string& n : names) {
    oralab_preset_result* r = nullptr;
    const oralab_status s = oralab_preset_run(n.c_str(), g.threads, g.seed.value_or(0), &r);
    if (s != ORALAB_OK) return report(s);
    const bool ok = oralab_preset_result_passed(r) != 0;
    std::printf("[%s] %d %s (%.1f s, %zu warnings)\n", ok ? "PASS" : "FAIL",
                oralab_preset_result_id(r), oralab_preset_result_name(r),
                oralab_preset_result_seconds(r), oralab_preset_result_warnings(r));
    for (std::size_t i = 0; i < oralab_preset_result_detail_count(r); ++i) {
      std::printf("    %s\n", oralab_preset_result_detail(r, i));
    }
    std::fflush(stdout);
    oralab_preset_result_free(r);
    if (!ok) rc = kExitFailure;
  }
  return rc;
}

int presets_show(const std::string& name) {
  oralab_scenario* sc = nullptr;
  oralab_status s = oralab_scenario_preset(name.c_str(), &sc);
  if (s != ORALAB_OK) return report(s);
  char* json = nullptr;
  s = oralab_scenario_to_json(sc, &json);
  if (s == ORALAB_OK) {
    std::cout << json << '\n';
    oralab_string_free(json);
  }
  oralab_scenario_free(sc);
  return report(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oralab: barrier solvers and particle simulations for removal problems"};
  app.set_version_flag("--version", std::string(oralab_version()));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "scenario JSON file");
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  app.add_flag("--strict", g.strict, "turn warnings into errors");

  struct Cmd {
    const char* name;
    const char* help;
    oralab_task task;
    std::optional<oralab_model> model;
  };
  const Cmd cmds[] = {
      {"solve-rab", "barrier sweep for a boundary-removal config", ORALAB_TASK_SOLVE,
       ORALAB_MODEL_RAB},
      {"solve-raq", "barrier sweep for a quantile-removal config", ORALAB_TASK_SOLVE,
       ORALAB_MODEL_RAQ},
      {"simulate-rab", "particle replicas for a boundary-removal config", ORALAB_TASK_SIMULATE,
       ORALAB_MODEL_RAB},
      {"simulate-raq", "particle replicas for a quantile-removal config", ORALAB_TASK_SIMULATE,
       ORALAB_MODEL_RAQ},
      {"check-ora", "ORA residuals of barriers and particle traces", ORALAB_TASK_CHECK_ORA,
       std::nullopt},
      {"compare", "barrier vs particle tables plus paired checks", ORALAB_TASK_COMPARE,
       std::nullopt},
      {"sweep", "everything above", ORALAB_TASK_SWEEP, std::nullopt},
  };
  std::vector<std::pair<CLI::App*, const Cmd*>> task_cmds;
  for (const Cmd& c : cmds) task_cmds.emplace_back(app.add_subcommand(c.name, c.help), &c);

  auto* presets = app.add_subcommand("presets", "named acceptance presets");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "list presets");
  std::vector<std::string> run_names;
  auto* prun = presets->add_subcommand("run", "run presets (names, ids or 'all')");
  prun->add_option("names", run_names, "presets to run");
  std::string show_name;
  auto* pshow = presets->add_subcommand("show", "print a reference scenario as JSON");
  pshow->add_option("scenario", show_name, "rab-preset or raq-preset")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  for (const auto& [sub, cmd] : task_cmds) {
    if (sub->parsed()) return run_task(g, cmd->task, cmd->model);
  }
  if (presets->parsed()) {
    if (prun->parsed()) return presets_run(g, run_names);
    if (pshow->parsed()) return presets_show(show_name);
    return presets_list();
  }
  return kExitFailure;
}
