#include "oralab/particle_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "oralab/error.hpp"

namespace oralab {

// ---------------------------------------------------------------------------
// Empirical tails

EmpiricalTail::EmpiricalTail(std::vector<double> sorted_positions, double N)
    : sorted_(std::move(sorted_positions)), N_(N) {
  if (!(N_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  if (!std::is_sorted(sorted_.begin(), sorted_.end())) std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalTail::operator()(double r) const noexcept {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), r);
  return static_cast<double>(sorted_.end() - it) / N_;
}

double EmpiricalTail::strictly_above(double r) const noexcept {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), r);
  return static_cast<double>(sorted_.end() - it) / N_;
}

std::size_t EmpiricalTrace::snapshot_index(double t) const {
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (std::abs(snapshot_times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  }
  std::ostringstream os;
  os << "trace has no snapshot at t = " << t;
  throw Error(ErrorCode::NoSnapshotAtTime, os.str());
}

RemovalMeasure EmpiricalTrace::removal_measure() const {
  RemovalMeasure m;
  const double w = 1.0 / static_cast<double>(N);
  for (const RemovalEvent& e : removals) m.add_atom(e.time, e.position, w);
  return m;
}

EmpiricalTail empirical_tail(const EmpiricalTrace& trace, double t) {
  return EmpiricalTail(trace.snapshots[trace.snapshot_index(t)],
                       static_cast<double>(trace.N));
}

std::size_t quantile_rank(std::size_t n, double Q) {
  if (n == 0) throw Error(ErrorCode::PopulationUnderflow, "no particle left to remove");
  const double x = static_cast<double>(n) * Q;
  // guard against x landing one ulp above an integer
  double c = std::ceil(x - 1e-9 * std::max(1.0, x));
  if (c < 1.0) c = 1.0;
  if (c > static_cast<double>(n)) c = static_cast<double>(n);
  return static_cast<std::size_t>(c);
}

// ---------------------------------------------------------------------------
// Sampling

InverseCdf::InverseCdf(const AtomList& atoms, const std::optional<DensityGrid>& density)
    : atoms_(atoms.atoms()), density_(density) {
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& a, const Atom& b) { return a.x < b.x; });
  total_ = atoms.total_weight();
  if (density_) {
    cum_ = left_cumulative(*density_);
    total_ += cum_.back();
  }
  if (!(total_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot sample a zero measure");
}

InverseCdf::InverseCdf(const DensityGrid& density) : InverseCdf(AtomList(), density) {}

namespace {

double density_cdf(const DensityGrid& d, const std::vector<double>& cum, double x) {
  const Grid& g = d.grid();
  if (x <= g.x_min()) return 0.0;
  if (x >= g.x_max()) return cum.back();
  const std::size_t i = g.cell_of(x);
  return cum[i] + d[i] * (x - g.breakpoint(i));
}

double density_quantile(const DensityGrid& d, const std::vector<double>& cum, double z) {
  const Grid& g = d.grid();
  if (z <= 0.0) {
    // inf of the support
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] > 0.0) return g.breakpoint(i);
    }
    return g.x_min();
  }
  const auto it = std::lower_bound(cum.begin(), cum.end(), z);
  if (it == cum.end()) return g.x_max();
  const std::size_t k = static_cast<std::size_t>(it - cum.begin());
  if (k == 0) return g.x_min();
  const double v = d[k - 1];
  const double w = v > 0.0 ? std::clamp((z - cum[k - 1]) / v, 0.0, g.h()) : 0.0;
  return g.breakpoint(k - 1) + w;
}

}  // namespace

double InverseCdf::cdf(double x) const noexcept {
  double s = density_ ? density_cdf(*density_, cum_, x) : 0.0;
  for (const Atom& a : atoms_) {
    if (a.x > x) break;
    s += a.weight;
  }
  return s;
}

double InverseCdf::operator()(double u) const {
  const double y = u * total_;
  double below = 0.0;  // atom weight strictly left of the current atom
  for (const Atom& a : atoms_) {
    const double dens = density_ ? density_cdf(*density_, cum_, a.x) : 0.0;
    if (dens + below >= y && density_) return density_quantile(*density_, cum_, y - below);
    if (dens + below + a.weight >= y) return a.x;
    below += a.weight;
  }
  if (density_) return density_quantile(*density_, cum_, y - below);
  return atoms_.back().x;
}

bool measure_leq(const AtomList& a_tilde, const std::optional<DensityGrid>& d_tilde,
                 const AtomList& a, const std::optional<DensityGrid>& d) {
  // Tails are right-continuous steps plus piecewise-linear parts, so it is
  // enough to compare at atoms (from both sides) and at grid breakpoints.
  std::vector<double> points;
  for (const Atom& x : a_tilde.atoms()) points.push_back(x.x);
  for (const Atom& x : a.atoms()) points.push_back(x.x);
  for (const auto* dens : {&d_tilde, &d}) {
    if (*dens) {
      for (std::size_t k = 0; k <= (*dens)->size(); ++k) {
        points.push_back((*dens)->grid().breakpoint(k));
      }
    }
  }
  const auto tail = [](const AtomList& atoms, const std::optional<DensityGrid>& dens,
                       double r, bool closed) {
    double s = 0.0;
    for (const Atom& x : atoms.atoms()) {
      if (closed ? x.x >= r : x.x > r) s += x.weight;
    }
    if (dens) s += dens->mass_between(r, dens->grid().x_max());
    return s;
  };
  const double tol = 1e-12;
  for (double r : points) {
    for (bool closed : {true, false}) {
      if (tail(a_tilde, d_tilde, r, closed) > tail(a, d, r, closed) + tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Shared simulation machinery

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replica, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replica),
                      static_cast<std::uint32_t>(replica >> 32), tag};
    rng_.seed(seq);
  }
  // uniform on (0, 1)
  double uniform() {
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() { return normal_(rng_); }

 private:
  std::mt19937_64 rng_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
};

std::vector<double> level_times(const CumulativeSchedule& S, std::size_t N, double horizon) {
  std::vector<double> out;
  for (std::size_t k = 1;; ++k) {
    const double t = S.inverse(static_cast<double>(k) / static_cast<double>(N), horizon);
    if (!(t <= horizon)) break;
    out.push_back(t);
  }
  return out;
}

std::vector<double> sorted_snapshot_times(std::vector<double> ts, double horizon) {
  std::vector<double> out;
  for (double t : ts) {
    if (t < 0.0 || t > horizon + 1e-12) {
      std::ostringstream os;
      os << "snapshot time " << t << " lies outside [0, " << horizon << "]";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
    out.push_back(std::min(t, horizon));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Population {
  std::vector<double> pos;
  std::vector<double> last;
  std::vector<std::uint64_t> label;

  std::size_t size() const { return pos.size(); }

  void add(double x, double t, std::uint64_t l) {
    pos.push_back(x);
    last.push_back(t);
    label.push_back(l);
  }

  void materialize(double t, Stream& rng) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const double dt = t - last[i];
      if (dt > 0.0) {
        pos[i] += std::sqrt(dt) * rng.normal();
        last[i] = t;
      }
    }
  }

  // index of the rightmost particle; ties go to the smallest label
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pos.size(); ++i) {
      if (pos[i] > pos[best] || (pos[i] == pos[best] && label[i] < label[best])) best = i;
    }
    return best;
  }

  void remove(std::size_t i) {
    const std::size_t last_index = pos.size() - 1;
    pos[i] = pos[last_index];
    last[i] = last[last_index];
    label[i] = label[last_index];
    pos.pop_back();
    last.pop_back();
    label.pop_back();
  }

  std::vector<double> sorted() const {
    std::vector<double> s(pos);
    std::sort(s.begin(), s.end());
    return s;
  }
};

RemovalEvent describe_removal(const Population& p, std::size_t i, double t) {
  RemovalEvent e;
  e.time = t;
  e.position = p.pos[i];
  e.label = p.label[i];
  e.alive_before = static_cast<std::uint32_t>(p.size());
  for (double x : p.pos) {
    if (x > e.position) ++e.n_right;
    if (x < e.position) ++e.n_left;
  }
  return e;
}

void record_probes(EmpiricalTrace& trace, const std::vector<double>& pos) {
  const std::size_t R = trace.probe_r.size();
  if (R == 0) return;
  const std::vector<double>& r = trace.probe_r;
  std::vector<std::uint32_t> hist(R + 1, 0);
  // hist[k] counts particles with exactly k probes <= x
  const double step = R > 1 ? (r[R - 1] - r[0]) / static_cast<double>(R - 1) : 0.0;
  bool even = R > 1 && step > 0.0;
  for (std::size_t m = 1; even && m < R; ++m) {
    even = std::abs(r[m] - (r[0] + static_cast<double>(m) * step)) <= 1e-9 * step;
  }
  if (even) {
    const double inv = 1.0 / step;
    for (double x : pos) {
      const double g = std::floor((x - r[0]) * inv) + 1.0;
      std::size_t k = g <= 0.0 ? 0 : g >= static_cast<double>(R) ? R : static_cast<std::size_t>(g);
      while (k > 0 && r[k - 1] > x) --k;
      while (k < R && r[k] <= x) ++k;
      ++hist[k];
    }
  } else {
    for (double x : pos) {
      ++hist[static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin())];
    }
  }
  // particles with r_m <= x are those whose index exceeds m
  std::vector<std::uint32_t> counts(R, 0);
  std::uint32_t acc = 0;
  for (std::size_t m = R; m-- > 0;) {
    acc += hist[m + 1];
    counts[m] = acc;
  }
  trace.probe_counts.insert(trace.probe_counts.end(), counts.begin(), counts.end());
}

void violation(EmpiricalTrace& trace, bool throw_now, const std::string& what) {
  ++trace.ora_violations;
  if (throw_now) throw Error(ErrorCode::InvariantViolation, what);
}

EmpiricalTrace new_trace(const SimulationOptions& o, const std::vector<double>& snaps) {
  EmpiricalTrace t;
  t.N = o.N;
  t.seed = o.seed;
  t.replica = o.replica;
  t.snapshot_times = snaps;
  t.probe_r = o.probe_r;
  std::sort(t.probe_r.begin(), t.probe_r.end());
  return t;
}

// stream tags
constexpr std::uint32_t kTagInitial = 1;
constexpr std::uint32_t kTagInjection = 2;
constexpr std::uint32_t kTagMotion = 3;

}  // namespace

// ---------------------------------------------------------------------------
// RAB

EmpiricalTrace simulate_rab(const RabData& data, const SimulationOptions& options) {
  data.validate();
  if (options.N == 0) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  const double eps0 = data.epsilon0();
  if (static_cast<double>(options.N) * eps0 - 1.0 < 1.0) {
    std::ostringstream os;
    os << "N * inf(1 + I - J) - 1 = " << static_cast<double>(options.N) * eps0 - 1.0
       << " must be at least 1";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const double T = data.horizon;
  const std::size_t N = options.N;
  const std::vector<double> snaps = sorted_snapshot_times(options.snapshot_times, T);
  EmpiricalTrace trace = new_trace(options, snaps);

  Stream init_rng(options.seed, options.replica, kTagInitial);
  Stream inj_rng(options.seed, options.replica, kTagInjection);
  Stream motion(options.seed, options.replica, kTagMotion);
  const InverseCdf u0_sampler(data.u0);
  std::optional<InverseCdf> pi_sampler;
  if (!data.injection.I.is_identically_zero()) {
    pi_sampler.emplace(data.injection.atoms, data.injection.density);
  }

  Population pop;
  for (std::size_t i = 0; i < N; ++i) pop.add(u0_sampler(init_rng.uniform()), 0.0, i + 1);
  std::uint64_t next_label = N + 1;

  const std::vector<double> inj = pi_sampler ? level_times(data.injection.I, N, T)
                                             : std::vector<double>{};
  const std::vector<double> rem = level_times(data.J, N, T);
  std::size_t a = 0, b = 0, c = 0;
  while (a < inj.size() || b < rem.size() || c < snaps.size()) {
    const double t = std::min({a < inj.size() ? inj[a] : kInf, b < rem.size() ? rem[b] : kInf,
                               c < snaps.size() ? snaps[c] : kInf});
    // inject, then remove, then look
    while (a < inj.size() && inj[a] == t) {
      pop.add((*pi_sampler)(inj_rng.uniform()), t, next_label++);
      ++trace.injections;
      ++a;
    }
    if (b < rem.size() && rem[b] == t) pop.materialize(t, motion);
    while (b < rem.size() && rem[b] == t) {
      if (pop.size() == 0) {
        throw Error(ErrorCode::PopulationUnderflow, "removal scheduled with no particle alive");
      }
      const std::size_t i = pop.argmax();
      const RemovalEvent e = describe_removal(pop, i, t);
      record_probes(trace, pop.pos);
      if (e.n_right != 0) {
        std::ostringstream os;
        os << "removal at t=" << t << " left " << e.n_right << " particles to its right";
        violation(trace, options.throw_on_violation, os.str());
      }
      trace.removals.push_back(e);
      pop.remove(i);
      ++b;
    }
    while (c < snaps.size() && snaps[c] == t) {
      pop.materialize(t, motion);
      trace.snapshots.push_back(pop.sorted());
      ++c;
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// RAQ

EmpiricalTrace simulate_raq(const RaqData& data, const SimulationOptions& options) {
  data.validate();
  if (options.N == 0) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  const std::size_t N = options.N;
  const double T = std::min(data.horizon, 1.0);
  const std::vector<double> snaps = sorted_snapshot_times(options.snapshot_times, T);
  EmpiricalTrace trace = new_trace(options, snaps);

  Stream init_rng(options.seed, options.replica, kTagInitial);
  Stream motion(options.seed, options.replica, kTagMotion);
  const InverseCdf u0_sampler(data.u0);
  Population pop;
  for (std::size_t i = 0; i < N; ++i) pop.add(u0_sampler(init_rng.uniform()), 0.0, i + 1);

  std::vector<double> rem;
  for (std::size_t k = 1; k <= N; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(N);
    if (t > T) break;
    rem.push_back(t);
  }
  std::vector<std::size_t> order;
  std::size_t b = 0, c = 0;
  while (b < rem.size() || c < snaps.size()) {
    const double t = std::min(b < rem.size() ? rem[b] : kInf, c < snaps.size() ? snaps[c] : kInf);
    if (b < rem.size() && rem[b] == t) {
      pop.materialize(t, motion);
      const std::size_t n = pop.size();
      const double Q = data.q.fraction(t);
      const double q = data.q.q(t);
      const std::size_t rank = quantile_rank(n, Q);
      order.resize(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      const auto above = [&](std::size_t x, std::size_t y) {
        return pop.pos[x] > pop.pos[y] || (pop.pos[x] == pop.pos[y] && pop.label[x] < pop.label[y]);
      };
      std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                       order.end(), above);
      const std::size_t i = order[rank - 1];
      const RemovalEvent e = describe_removal(pop, i, t);
      record_probes(trace, pop.pos);
      const double Nd = static_cast<double>(N);
      const double slack = 1e-9;
      if (static_cast<double>(e.n_right) > Nd * q + 1.0 + slack ||
          static_cast<double>(e.n_left) > Nd * (1.0 - t - q) + 1.0 + slack) {
        std::ostringstream os;
        os << "quantile removal at t=" << t << " has " << e.n_right << " right / " << e.n_left
           << " left of it, beyond " << Nd * q + 1.0 << " / " << Nd * (1.0 - t - q) + 1.0;
        violation(trace, options.throw_on_violation, os.str());
      }
      trace.removals.push_back(e);
      pop.remove(i);
      ++b;
    }
    while (c < snaps.size() && snaps[c] == t) {
      pop.materialize(t, motion);
      trace.snapshots.push_back(pop.sorted());
      ++c;
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Coupled RAB pair

namespace {

constexpr std::ptrdiff_t kNone = -1;

// Original particles drive their own Brownian motion; each tilde particle is
// paired with a distinct original particle, sits weakly left of it, and
// moves with its increments. Pairing implies tail dominance.
struct CoupledPopulation {
  Population orig;
  Population tilde;
  std::vector<std::ptrdiff_t> orig_partner;   // tilde index or kNone
  std::vector<std::ptrdiff_t> tilde_partner;  // orig index

  void add_pair(double x, double x_tilde, double t, std::uint64_t label) {
    orig.add(x, t, label);
    tilde.add(x_tilde, t, label);
    orig_partner.push_back(static_cast<std::ptrdiff_t>(tilde.size() - 1));
    tilde_partner.push_back(static_cast<std::ptrdiff_t>(orig.size() - 1));
  }

  void add_orig(double x, double t, std::uint64_t label) {
    orig.add(x, t, label);
    orig_partner.push_back(kNone);
  }

  void materialize(double t, Stream& rng) {
    for (std::size_t i = 0; i < orig.size(); ++i) {
      const double dt = t - orig.last[i];
      if (dt > 0.0) {
        const double dw = std::sqrt(dt) * rng.normal();
        orig.pos[i] += dw;
        orig.last[i] = t;
        if (orig_partner[i] != kNone) {
          const auto j = static_cast<std::size_t>(orig_partner[i]);
          tilde.pos[j] += dw;
          tilde.last[j] = t;
        }
      }
    }
  }

  void remove_orig(std::size_t i) {
    const std::size_t back = orig.size() - 1;
    if (i != back && orig_partner[back] != kNone) {
      tilde_partner[static_cast<std::size_t>(orig_partner[back])] = static_cast<std::ptrdiff_t>(i);
    }
    orig_partner[i] = orig_partner[back];
    orig_partner.pop_back();
    orig.remove(i);
  }

  void remove_tilde(std::size_t j) {
    const std::size_t back = tilde.size() - 1;
    if (j != back) {
      orig_partner[static_cast<std::size_t>(tilde_partner[back])] = static_cast<std::ptrdiff_t>(j);
    }
    tilde_partner[j] = tilde_partner[back];
    tilde_partner.pop_back();
    tilde.remove(j);
  }

  void pair(std::size_t i, std::size_t j) {
    orig_partner[i] = static_cast<std::ptrdiff_t>(j);
    tilde_partner[j] = static_cast<std::ptrdiff_t>(i);
  }
};

bool sorted_dominance(const Population& tilde, const Population& orig) {
  if (tilde.size() > orig.size()) return false;
  std::vector<double> a(tilde.pos), b(orig.pos);
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
  }
  return true;
}

void coupling_precondition(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::CouplingPreconditionViolated, what);
}

}  // namespace

CoupledTrace simulate_coupled_rab(const RabData& data, const RabData& data_tilde,
                                  const SimulationOptions& options) {
  data.validate();
  data_tilde.validate();
  require_same_grid(data.u0.grid(), data_tilde.u0.grid());
  coupling_precondition(data.horizon == data_tilde.horizon, "both systems need the same horizon");
  const double T = data.horizon;
  coupling_precondition(leq(data_tilde.u0, data.u0), "initial data must satisfy u0~ <= u0");
  const bool inject = !data.injection.I.is_identically_zero();
  const bool inject_tilde = !data_tilde.injection.I.is_identically_zero();
  if (inject && inject_tilde) {
    coupling_precondition(measure_leq(data_tilde.injection.atoms, data_tilde.injection.density,
                                      data.injection.atoms, data.injection.density),
                          "injection laws must satisfy pi~ <= pi");
  }
  coupling_precondition(
      difference_nondecreasing(data.injection.I, data_tilde.injection.I, T),
      "I - I~ must be nondecreasing");
  coupling_precondition(difference_nondecreasing(data_tilde.J, data.J, T),
                        "J~ - J must be nondecreasing");
  const std::size_t N = options.N;
  for (const RabData* d : {&data, &data_tilde}) {
    if (static_cast<double>(N) * d->epsilon0() - 1.0 < 1.0) {
      throw Error(ErrorCode::InvalidArgument, "N * inf(1 + I - J) - 1 must be at least 1");
    }
  }

  const std::vector<double> snaps = sorted_snapshot_times(options.snapshot_times, T);
  CoupledTrace out;
  out.trace = new_trace(options, snaps);
  out.trace_tilde = new_trace(options, snaps);

  Stream init_rng(options.seed, options.replica, kTagInitial);
  Stream inj_rng(options.seed, options.replica, kTagInjection);
  Stream motion(options.seed, options.replica, kTagMotion);
  const InverseCdf F(data.u0);
  const InverseCdf F_tilde(data_tilde.u0);
  std::optional<InverseCdf> G, G_tilde;
  if (inject) G.emplace(data.injection.atoms, data.injection.density);
  if (inject_tilde) G_tilde.emplace(data_tilde.injection.atoms, data_tilde.injection.density);

  CoupledPopulation pop;
  for (std::size_t i = 0; i < N; ++i) {
    const double u = init_rng.uniform();
    pop.add_pair(F(u), F_tilde(u), 0.0, i + 1);
  }
  std::uint64_t next_label = N + 1;

  const auto extra_inj = CumulativeSchedule::difference(data.injection.I, data_tilde.injection.I);
  const auto extra_rem = CumulativeSchedule::difference(data_tilde.J, data.J);
  const std::vector<double> shared_inj =
      inject_tilde ? level_times(data_tilde.injection.I, N, T) : std::vector<double>{};
  const std::vector<double> own_inj =
      inject ? level_times(extra_inj, N, T) : std::vector<double>{};
  const std::vector<double> joint_rem = level_times(data.J, N, T);
  const std::vector<double> tilde_rem = level_times(extra_rem, N, T);

  const auto remove_event = [&](EmpiricalTrace& tr, const Population& p, std::size_t i,
                                double t) {
    const RemovalEvent e = describe_removal(p, i, t);
    record_probes(tr, p.pos);
    if (e.n_right != 0) {
      std::ostringstream os;
      os << "removal at t=" << t << " left " << e.n_right << " particles to its right";
      violation(tr, options.throw_on_violation, os.str());
    }
    tr.removals.push_back(e);
  };

  std::size_t a = 0, a2 = 0, b = 0, b2 = 0, c = 0;
  const auto head = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? v[i] : kInf;
  };
  while (a < shared_inj.size() || a2 < own_inj.size() || b < joint_rem.size() ||
         b2 < tilde_rem.size() || c < snaps.size()) {
    const double t = std::min({head(shared_inj, a), head(own_inj, a2), head(joint_rem, b),
                               head(tilde_rem, b2), head(snaps, c)});
    bool event = false;
    while (a < shared_inj.size() && shared_inj[a] == t) {
      const double u = inj_rng.uniform();
      // a shared injection enters both systems even if I has no mass there
      const double x_tilde = (*G_tilde)(u);
      const double x = G ? (*G)(u) : x_tilde;
      pop.add_pair(x, x_tilde, t, next_label++);
      ++out.trace.injections;
      ++out.trace_tilde.injections;
      ++a;
      event = true;
    }
    while (a2 < own_inj.size() && own_inj[a2] == t) {
      pop.add_orig((*G)(inj_rng.uniform()), t, next_label++);
      ++out.trace.injections;
      ++a2;
      event = true;
    }
    if ((b < joint_rem.size() && joint_rem[b] == t) || (b2 < tilde_rem.size() && tilde_rem[b2] == t)) {
      pop.materialize(t, motion);
    }
    while (b < joint_rem.size() && joint_rem[b] == t) {
      if (pop.orig.size() == 0 || pop.tilde.size() == 0) {
        throw Error(ErrorCode::PopulationUnderflow, "joint removal with an empty system");
      }
      const std::size_t i = pop.orig.argmax();
      const std::size_t j = pop.tilde.argmax();
      remove_event(out.trace, pop.orig, i, t);
      remove_event(out.trace_tilde, pop.tilde, j, t);
      const std::ptrdiff_t i_partner = pop.orig_partner[i];   // tilde index
      const auto j_partner = static_cast<std::size_t>(pop.tilde_partner[j]);  // orig index
      // re-pair the orphans before indices move
      if (i_partner != kNone && static_cast<std::size_t>(i_partner) != j) {
        pop.pair(j_partner, static_cast<std::size_t>(i_partner));
        pop.orig_partner[i] = kNone;
        pop.tilde_partner[j] = static_cast<std::ptrdiff_t>(i);
      } else if (i_partner == kNone) {
        pop.orig_partner[j_partner] = kNone;
        pop.tilde_partner[j] = static_cast<std::ptrdiff_t>(i);
        pop.orig_partner[i] = static_cast<std::ptrdiff_t>(j);
      }
      // now i and j are partners of each other; drop both
      pop.remove_tilde(j);
      pop.orig_partner[i] = kNone;
      pop.remove_orig(i);
      ++b;
      event = true;
    }
    while (b2 < tilde_rem.size() && tilde_rem[b2] == t) {
      if (pop.tilde.size() == 0) {
        throw Error(ErrorCode::PopulationUnderflow, "removal with an empty tilde system");
      }
      const std::size_t j = pop.tilde.argmax();
      remove_event(out.trace_tilde, pop.tilde, j, t);
      pop.orig_partner[static_cast<std::size_t>(pop.tilde_partner[j])] = kNone;
      pop.remove_tilde(j);
      ++b2;
      event = true;
    }
    if (event) {
      ++out.dominance_checks;
      if (!sorted_dominance(pop.tilde, pop.orig)) {
        ++out.dominance_violations;
        if (options.throw_on_violation) {
          std::ostringstream os;
          os << "coupled configurations lose tail dominance at t=" << t;
          throw Error(ErrorCode::InvariantViolation, os.str());
        }
      }
    }
    while (c < snaps.size() && snaps[c] == t) {
      pop.materialize(t, motion);
      out.trace.snapshots.push_back(pop.orig.sorted());
      out.trace_tilde.snapshots.push_back(pop.tilde.sorted());
      ++c;
    }
  }
  return out;
}

}  // namespace oralab
