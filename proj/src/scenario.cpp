#include "oralab/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "oralab/error.hpp"

namespace oralab {

using nlohmann::json;

const char* to_string(Model m) { return m == Model::Rab ? "rab" : "raq"; }

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, where + ": " + what);
}

// Rejects keys outside `allowed` and checks that `required` are present.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required = {}) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) bad(where, "unknown key '" + k + "'");
  }
  for (const char* k : required) {
    if (!j.contains(k)) bad(where, std::string("missing key '") + k + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(where + "." + key, e.what());
  }
}

template <class T>
T get_required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where, std::string("missing key '") + key + "'");
  return get<T>(j, key, where, T{});
}

DensitySpec parse_density(const json& j, const std::string& where) {
  DensitySpec d;
  if (!j.is_object()) bad(where, "expected an object");
  const std::string kind = get_required<std::string>(j, "kind", where);
  if (kind == "uniform") {
    check_keys(j, where, {"kind", "a", "b", "mass"}, {"a", "b"});
    d.kind = DensitySpec::Kind::Uniform;
    d.a = get<double>(j, "a", where, 0.0);
    d.b = get<double>(j, "b", where, 1.0);
  } else if (kind == "gaussian") {
    check_keys(j, where, {"kind", "mean", "std", "mass"}, {"mean", "std"});
    d.kind = DensitySpec::Kind::Gaussian;
    d.mean = get<double>(j, "mean", where, 0.0);
    d.std_dev = get<double>(j, "std", where, 1.0);
  } else if (kind == "piecewise") {
    check_keys(j, where, {"kind", "breaks", "values", "mass"}, {"breaks", "values"});
    d.kind = DensitySpec::Kind::Piecewise;
    d.breaks = get<std::vector<double>>(j, "breaks", where, {});
    d.values = get<std::vector<double>>(j, "values", where, {});
  } else {
    bad(where, "unknown density kind '" + kind + "'");
  }
  d.mass = get<double>(j, "mass", where, 1.0);
  return d;
}

json density_json(const DensitySpec& d) {
  switch (d.kind) {
    case DensitySpec::Kind::Uniform:
      return json{{"kind", "uniform"}, {"a", d.a}, {"b", d.b}, {"mass", d.mass}};
    case DensitySpec::Kind::Gaussian:
      return json{{"kind", "gaussian"}, {"mean", d.mean}, {"std", d.std_dev}, {"mass", d.mass}};
    case DensitySpec::Kind::Piecewise:
      break;
  }
  return json{{"kind", "piecewise"}, {"breaks", d.breaks}, {"values", d.values}, {"mass", d.mass}};
}

ScheduleSpec parse_schedule(const json& j, const std::string& where) {
  ScheduleSpec s;
  if (!j.is_object()) bad(where, "expected an object");
  const std::string kind = get_required<std::string>(j, "kind", where);
  if (kind == "zero") {
    check_keys(j, where, {"kind"});
    s.kind = ScheduleSpec::Kind::Zero;
  } else if (kind == "linear") {
    check_keys(j, where, {"kind", "rate"}, {"rate"});
    s.kind = ScheduleSpec::Kind::Linear;
    s.rate = get<double>(j, "rate", where, 1.0);
  } else if (kind == "piecewise_linear") {
    check_keys(j, where, {"kind", "times", "values"}, {"times", "values"});
    s.kind = ScheduleSpec::Kind::PiecewiseLinear;
    s.times = get<std::vector<double>>(j, "times", where, {});
    s.values = get<std::vector<double>>(j, "values", where, {});
  } else if (kind == "power") {
    check_keys(j, where, {"kind", "scale", "exponent"}, {"scale", "exponent"});
    s.kind = ScheduleSpec::Kind::Power;
    s.scale = get<double>(j, "scale", where, 1.0);
    s.exponent = get<double>(j, "exponent", where, 1.0);
  } else if (kind == "capped") {
    check_keys(j, where, {"kind", "cap"}, {"cap"});
    s.kind = ScheduleSpec::Kind::Capped;
    s.cap = get<double>(j, "cap", where, 1.0);
  } else {
    bad(where, "unknown schedule kind '" + kind + "'");
  }
  return s;
}

json schedule_json(const ScheduleSpec& s) {
  switch (s.kind) {
    case ScheduleSpec::Kind::Zero:
      return json{{"kind", "zero"}};
    case ScheduleSpec::Kind::Linear:
      return json{{"kind", "linear"}, {"rate", s.rate}};
    case ScheduleSpec::Kind::PiecewiseLinear:
      return json{{"kind", "piecewise_linear"}, {"times", s.times}, {"values", s.values}};
    case ScheduleSpec::Kind::Power:
      return json{{"kind", "power"}, {"scale", s.scale}, {"exponent", s.exponent}};
    case ScheduleSpec::Kind::Capped:
      break;
  }
  return json{{"kind", "capped"}, {"cap", s.cap}};
}

QuantileSpec parse_quantile(const json& j, const std::string& where) {
  QuantileSpec q;
  if (!j.is_object()) bad(where, "expected an object");
  const std::string kind = get_required<std::string>(j, "kind", where);
  if (kind == "fraction") {
    check_keys(j, where, {"kind", "Q"}, {"Q"});
    q.kind = QuantileSpec::Kind::Fraction;
    q.Q = get<double>(j, "Q", where, 0.5);
  } else if (kind == "fraction_piecewise" || kind == "q_piecewise") {
    check_keys(j, where, {"kind", "times", "values"}, {"times", "values"});
    q.kind = kind == "q_piecewise" ? QuantileSpec::Kind::QPiecewise
                                   : QuantileSpec::Kind::FractionPiecewise;
    q.times = get<std::vector<double>>(j, "times", where, {});
    q.values = get<std::vector<double>>(j, "values", where, {});
  } else {
    bad(where, "unknown quantile kind '" + kind + "'");
  }
  return q;
}

json quantile_json(const QuantileSpec& q) {
  switch (q.kind) {
    case QuantileSpec::Kind::Fraction:
      return json{{"kind", "fraction"}, {"Q", q.Q}};
    case QuantileSpec::Kind::FractionPiecewise:
      return json{{"kind", "fraction_piecewise"}, {"times", q.times}, {"values", q.values}};
    case QuantileSpec::Kind::QPiecewise:
      break;
  }
  return json{{"kind", "q_piecewise"}, {"times", q.times}, {"values", q.values}};
}

// Library errors raised while building the data are config errors here.
template <class F>
auto as_config_error(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    bad(where, e.what());
  }
}

}  // namespace

DensityGrid DensitySpec::build(const Grid& grid) const {
  switch (kind) {
    case Kind::Uniform:
      return DensityGrid::uniform(grid, a, b, mass);
    case Kind::Gaussian:
      return DensityGrid::gaussian(grid, mean, std_dev, mass);
    case Kind::Piecewise:
      break;
  }
  DensityGrid d = DensityGrid::piecewise(grid, breaks, values);
  const double m = d.total_mass();
  if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "piecewise density has no mass");
  return d.scaled(mass / m);
}

CumulativeSchedule ScheduleSpec::build() const {
  switch (kind) {
    case Kind::Zero:
      return CumulativeSchedule::zero();
    case Kind::Linear:
      return CumulativeSchedule::linear(rate);
    case Kind::PiecewiseLinear:
      return CumulativeSchedule::piecewise_linear(times, values);
    case Kind::Power:
      return CumulativeSchedule::power(scale, exponent);
    case Kind::Capped:
      break;
  }
  return CumulativeSchedule::capped(cap);
}

QuantileSchedule QuantileSpec::build() const {
  switch (kind) {
    case Kind::Fraction:
      return QuantileSchedule::constant_fraction(Q);
    case Kind::FractionPiecewise:
      return QuantileSchedule::fraction_piecewise_linear(times, values);
    case Kind::QPiecewise:
      break;
  }
  return QuantileSchedule::q_piecewise_linear(times, values);
}

Scenario Scenario::parse(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad("config", e.what());
  }
  check_keys(j, "config",
             {"schema", "name", "model", "grid", "u0", "pi", "I", "J", "q", "horizon", "solver",
              "simulation", "outputs", "comparison"},
             {"schema", "model", "grid", "u0", "horizon"});
  const int schema = get<int>(j, "schema", "config", 0);
  if (schema != kSchema) {
    bad("config.schema", "unsupported schema " + std::to_string(schema) + " (expected " +
                             std::to_string(kSchema) + ")");
  }

  Scenario s;
  s.name = get<std::string>(j, "name", "config", s.name);
  const std::string model = get<std::string>(j, "model", "config", "");
  if (model == "rab") {
    s.model = Model::Rab;
  } else if (model == "raq") {
    s.model = Model::Raq;
  } else {
    bad("config.model", "expected 'rab' or 'raq', got '" + model + "'");
  }

  const json& g = j.at("grid");
  check_keys(g, "config.grid", {"x_min", "x_max", "n_cells"}, {"x_min", "x_max", "n_cells"});
  s.grid.x_min = get<double>(g, "x_min", "config.grid", 0.0);
  s.grid.x_max = get<double>(g, "x_max", "config.grid", 0.0);
  s.grid.n_cells = get<std::size_t>(g, "n_cells", "config.grid", 0);

  s.u0 = parse_density(j.at("u0"), "config.u0");
  if (j.contains("pi")) {
    const json& p = j.at("pi");
    check_keys(p, "config.pi", {"atoms", "density"});
    if (p.contains("atoms")) {
      const json& a = p.at("atoms");
      if (!a.is_array()) bad("config.pi.atoms", "expected an array");
      for (const json& atom : a) {
        check_keys(atom, "config.pi.atoms[]", {"x", "weight"}, {"x", "weight"});
        s.pi_atoms.push_back(Atom{get<double>(atom, "x", "config.pi.atoms[]", 0.0),
                                  get<double>(atom, "weight", "config.pi.atoms[]", 0.0)});
      }
    }
    if (p.contains("density")) s.pi_density = parse_density(p.at("density"), "config.pi.density");
  }
  if (j.contains("I")) s.I = parse_schedule(j.at("I"), "config.I");
  if (j.contains("J")) s.J = parse_schedule(j.at("J"), "config.J");
  if (j.contains("q")) s.q = parse_quantile(j.at("q"), "config.q");
  s.horizon = get<double>(j, "horizon", "config", 0.0);

  if (j.contains("solver")) {
    const json& sv = j.at("solver");
    const std::string w = "config.solver";
    check_keys(sv, w, {"Delta", "delta", "method", "sub_steps", "snapshot_stride"});
    s.Deltas = get<std::vector<double>>(sv, "Delta", w, {});
    s.deltas = get<std::vector<double>>(sv, "delta", w, {});
    const std::string method = get<std::string>(sv, "method", w, "direct");
    if (method == "direct") {
      s.method = ConvolutionMethod::Direct;
    } else if (method == "fft") {
      s.method = ConvolutionMethod::Fft;
    } else {
      bad(w + ".method", "expected 'direct' or 'fft'");
    }
    s.sub_steps = get<int>(sv, "sub_steps", w, 1);
    s.snapshot_stride = get<std::size_t>(sv, "snapshot_stride", w, 0);
  }
  if (j.contains("simulation")) {
    const json& sm = j.at("simulation");
    const std::string w = "config.simulation";
    check_keys(sm, w, {"N", "replicas", "seed"});
    s.Ns = get<std::vector<std::size_t>>(sm, "N", w, {});
    s.replicas = get<std::size_t>(sm, "replicas", w, 1);
    s.seed = get<std::uint64_t>(sm, "seed", w, 1);
  }
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    const std::string w = "config.outputs";
    check_keys(o, w, {"snapshot_times", "r_grid", "r_count", "emit"});
    s.snapshot_times = get<std::vector<double>>(o, "snapshot_times", w, {});
    s.r_grid = get<std::vector<double>>(o, "r_grid", w, {});
    s.r_count = get<std::size_t>(o, "r_count", w, 64);
    if (o.contains("emit")) {
      const json& e = o.at("emit");
      const std::string we = w + ".emit";
      check_keys(e, we, {"density", "gap", "removal", "convergence", "ora", "traces", "plots"});
      s.emit.density = get<bool>(e, "density", we, true);
      s.emit.gap = get<bool>(e, "gap", we, true);
      s.emit.removal = get<bool>(e, "removal", we, true);
      s.emit.convergence = get<bool>(e, "convergence", we, true);
      s.emit.ora = get<bool>(e, "ora", we, true);
      s.emit.traces = get<bool>(e, "traces", we, false);
      s.emit.plots = get<bool>(e, "plots", we, true);
    }
  }
  if (j.contains("comparison")) {
    const json& c = j.at("comparison");
    const std::string w = "config.comparison";
    check_keys(c, w, {"dominance_J_factor", "cross_model"});
    s.dominance_J_factor = get<double>(c, "dominance_J_factor", w, 2.0);
    s.cross_model = get<bool>(c, "cross_model", w, true);
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

std::string Scenario::to_json() const {
  json j;
  j["schema"] = kSchema;
  j["name"] = name;
  j["model"] = to_string(model);
  j["grid"] = json{{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n_cells", grid.n_cells}};
  j["u0"] = density_json(u0);
  json pi = json::object();
  json atoms = json::array();
  for (const Atom& a : pi_atoms) atoms.push_back(json{{"x", a.x}, {"weight", a.weight}});
  pi["atoms"] = atoms;
  if (pi_density) pi["density"] = density_json(*pi_density);
  j["pi"] = pi;
  j["I"] = schedule_json(I);
  j["J"] = schedule_json(J);
  j["q"] = quantile_json(q);
  j["horizon"] = horizon;
  j["solver"] = json{{"Delta", Deltas},
                     {"delta", deltas},
                     {"method", method == ConvolutionMethod::Fft ? "fft" : "direct"},
                     {"sub_steps", sub_steps},
                     {"snapshot_stride", snapshot_stride}};
  j["simulation"] = json{{"N", Ns}, {"replicas", replicas}, {"seed", seed}};
  j["outputs"] = json{{"snapshot_times", snapshot_times},
                      {"r_grid", r_grid},
                      {"r_count", r_count},
                      {"emit",
                       {{"density", emit.density},
                        {"gap", emit.gap},
                        {"removal", emit.removal},
                        {"convergence", emit.convergence},
                        {"ora", emit.ora},
                        {"traces", emit.traces},
                        {"plots", emit.plots}}}};
  j["comparison"] = json{{"dominance_J_factor", dominance_J_factor}, {"cross_model", cross_model}};
  return j.dump(2);
}

RabData Scenario::rab_data() const {
  return as_config_error("config", [&] {
    const Grid g = grid.build();
    RabData d{u0.build(g), InjectionSchedule{}, J.build(), horizon};
    d.injection.atoms = AtomList(pi_atoms);
    if (pi_density) d.injection.density = pi_density->build(g);
    d.injection.I = I.build();
    return d;
  });
}

RaqData Scenario::raq_data() const {
  return as_config_error("config", [&] {
    const Grid g = grid.build();
    return RaqData{u0.build(g), q.build(), horizon};
  });
}

std::vector<std::pair<double, double>> Scenario::solver_cells() const {
  std::vector<std::pair<double, double>> cells;
  for (double D : Deltas) {
    if (deltas.empty()) {
      cells.emplace_back(D, default_delta(D));
    } else {
      for (double d : deltas) cells.emplace_back(D, d);
    }
  }
  return cells;
}

void Scenario::validate() const {
  if (!(horizon > 0.0)) bad("config.horizon", "must be positive");
  if (sub_steps < 1) bad("config.solver.sub_steps", "must be >= 1");
  for (double D : Deltas) {
    if (!(D > 0.0)) bad("config.solver.Delta", "entries must be positive");
  }
  for (double d : deltas) {
    if (!(d > 0.0)) bad("config.solver.delta", "entries must be positive");
  }
  for (std::size_t N : Ns) {
    if (N < 1) bad("config.simulation.N", "entries must be >= 1");
  }
  if (replicas < 1) bad("config.simulation.replicas", "must be >= 1");
  for (double t : snapshot_times) {
    if (t < 0.0 || t > horizon + 1e-12) bad("config.outputs.snapshot_times", "outside [0, horizon]");
  }
  if (r_grid.empty() && r_count < 2) bad("config.outputs.r_count", "must be >= 2");
  if (!(dominance_J_factor == 0.0 || dominance_J_factor >= 1.0)) {
    bad("config.comparison.dominance_J_factor", "must be 0 (off) or >= 1");
  }
  if (model == Model::Rab) {
    as_config_error("config", [&] { rab_data().validate(); });
  } else {
    as_config_error("config", [&] {
      const RaqData d = raq_data();
      d.validate();
      if (!d.q.identically_zero() && horizon >= 1.0) {
        throw Error(ErrorCode::InvalidArgument, "RAQ horizon must be below 1");
      }
    });
  }
}

}  // namespace oralab
