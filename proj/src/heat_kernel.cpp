#include "oralab/heat_kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "normal_math.hpp"
#include "oralab/error.hpp"

namespace oralab {

namespace {

constexpr double kTruncationSd = 8.0;

// Largest h / sqrt(t) for which the sampled kernel is used; there the
// variance of the sampled weights is within 2e-6 of t.
constexpr double kSampledMaxEta = 1.25;

// Kernel sampled at cell centres while it resolves the grid. Coarser than
// that, sampling collapses towards the identity, so the three-point kernel
// with the exact variance t is used instead (nonnegative and unimodal for
// h^2 >= 1.5 t).
std::vector<double> compute_weights(double h, double t) {
  const double eta = h / std::sqrt(t);
  if (eta > kSampledMaxEta) {
    const double a = 1.0 / (eta * eta);
    return {1.0 - a, 0.5 * a};
  }
  const std::size_t K = static_cast<std::size_t>(std::ceil(kTruncationSd / eta)) + 1;
  std::vector<double> w(K + 1, 0.0);
  for (std::size_t k = 0; k <= K; ++k) {
    const double z = static_cast<double>(k) * eta;
    w[k] = z > kTruncationSd ? 0.0 : std::exp(-0.5 * z * z);
  }
  double total = w[0];
  for (std::size_t k = 1; k <= K; ++k) total += 2.0 * w[k];
  for (double& x : w) x /= total;
  return w;
}

// Index of the cell a position m on the unfolded line maps to when both
// grid edges reflect.
inline std::size_t fold(std::ptrdiff_t m, std::ptrdiff_t n) {
  std::ptrdiff_t r = m % (2 * n);
  if (r < 0) r += 2 * n;
  if (r >= n) r = 2 * n - 1 - r;
  return static_cast<std::size_t>(r);
}

std::vector<double> extend(std::span<const double> v, std::size_t K) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  const auto k = static_cast<std::ptrdiff_t>(K);
  std::vector<double> e(v.size() + 2 * K);
  for (std::ptrdiff_t m = -k; m < n + k; ++m) e[static_cast<std::size_t>(m + k)] = v[fold(m, n)];
  return e;
}

std::vector<double> convolve_direct(std::span<const double> v,
                                    const std::vector<double>& w) {
  const std::size_t n = v.size();
  const std::size_t K = w.size() - 1;
  const std::vector<double> e = extend(v, K);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* c = e.data() + K + i;
    double acc = w[0] * c[0];
    for (std::size_t k = 1; k <= K; ++k) acc += w[k] * (c[-static_cast<std::ptrdiff_t>(k)] + c[k]);
    out[i] = acc;
  }
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t fft_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best <<= 1;
  // 3 * 2^k is sometimes closer
  for (std::size_t c = 3; c < best; c <<= 1) {
    if (c >= n) {
      best = std::min(best, c);
      break;
    }
  }
  return best;
}

std::vector<double> convolve_fft(std::span<const double> v, const std::vector<double>& w) {
  const std::size_t n = v.size();
  const std::size_t K = w.size() - 1;
  const std::vector<double> e = extend(v, K);
  const std::size_t L = fft_size(e.size() + 2 * K);
  const std::size_t nc = L / 2 + 1;

  double* a = fftw_alloc_real(L);
  double* b = fftw_alloc_real(L);
  fftw_complex* fa = fftw_alloc_complex(nc);
  fftw_complex* fb = fftw_alloc_complex(nc);
  std::fill(a, a + L, 0.0);
  std::fill(b, b + L, 0.0);
  std::copy(e.begin(), e.end(), a);
  for (std::size_t j = 0; j <= 2 * K; ++j) {
    b[j] = w[j >= K ? j - K : K - j];
  }

  fftw_plan pa, pb, pc;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(L), a, fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(L), b, fb, FFTW_ESTIMATE);
    pc = fftw_plan_dft_c2r_1d(static_cast<int>(L), fa, a, FFTW_ESTIMATE);
  }
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t j = 0; j < nc; ++j) {
    const double re = fa[j][0] * fb[j][0] - fa[j][1] * fb[j][1];
    const double im = fa[j][0] * fb[j][1] + fa[j][1] * fb[j][0];
    fa[j][0] = re;
    fa[j][1] = im;
  }
  fftw_execute(pc);

  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(L);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, a[2 * K + i] * scale);

  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pc);
  }
  fftw_free(a);
  fftw_free(b);
  fftw_free(fa);
  fftw_free(fb);
  return out;
}

}  // namespace

std::shared_ptr<const std::vector<double>> kernel_weights(double h, double t) {
  if (!(h > 0.0) || !(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "kernel weights need h > 0 and t > 0");
  }
  static std::mutex mutex;
  static std::map<std::pair<double, double>, std::shared_ptr<const std::vector<double>>> cache;
  const auto key = std::make_pair(h, t);
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto w = std::make_shared<const std::vector<double>>(compute_weights(h, t));
  std::lock_guard<std::mutex> lock(mutex);
  if (cache.size() >= 512) cache.clear();
  cache.emplace(key, w);
  return w;
}

DensityGrid apply_kernel(const DensityGrid& u, double t, ConvolutionMethod method) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "apply_kernel needs t >= 0");
  }
  if (t == 0.0) return u;
  const Grid& g = u.grid();
  const double reach = kTruncationSd * std::sqrt(t);
  if (reach > 0.5 * (g.x_max() - g.x_min())) {
    std::ostringstream os;
    os << "kernel reach " << reach << " exceeds half the domain width";
    warn(WarningKind::KernelWiderThanDomain, os.str(), reach);
  }
  const auto w = kernel_weights(g.h(), t);
  std::vector<double> out = method == ConvolutionMethod::Fft ? convolve_fft(u.values(), *w)
                                                             : convolve_direct(u.values(), *w);
  return DensityGrid(g, std::move(out));
}

DensityGrid smear_atoms(const Grid& grid, const AtomList& atoms, double t) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "smear_atoms needs t >= 0");
  }
  const std::size_t n = grid.n_cells();
  const double h = grid.h();
  std::vector<double> v(n, 0.0);
  std::vector<double> scratch;
  for (const Atom& atom : atoms.atoms()) {
    if (atom.weight == 0.0) continue;
    if (t == 0.0) {
      v[grid.cell_of(atom.x)] += atom.weight / h;
      continue;
    }
    const double sd = std::sqrt(t);
    const double lo = atom.x - kTruncationSd * sd;
    const double hi = atom.x + kTruncationSd * sd;
    if (lo < grid.x_min() || hi > grid.x_max()) {
      const double kept = detail::normal_mass((grid.x_min() - atom.x) / sd,
                                              (grid.x_max() - atom.x) / sd);
      std::ostringstream os;
      os << "atom at " << atom.x << " leaks an estimated " << atom.weight * (1.0 - kept)
         << " of mass past the grid at lag " << t;
      warn(WarningKind::TruncationLoss, os.str(), atom.weight * (1.0 - kept));
    }
    const std::size_t first = grid.cell_of(std::max(lo, grid.x_min()));
    const std::size_t last = grid.cell_of(std::min(hi, grid.x_max()));
    scratch.assign(last - first + 1, 0.0);
    double total = 0.0;
    const bool sampled = sd >= h;
    for (std::size_t i = first; i <= last; ++i) {
      double m;
      if (sampled) {
        const double z = (grid.center(i) - atom.x) / sd;
        m = std::abs(z) > kTruncationSd ? 0.0 : std::exp(-0.5 * z * z);
      } else {
        m = detail::normal_mass((grid.breakpoint(i) - atom.x) / sd,
                                (grid.breakpoint(i + 1) - atom.x) / sd);
      }
      scratch[i - first] = m;
      total += m;
    }
    if (!(total > 0.0)) {
      v[grid.cell_of(atom.x)] += atom.weight / h;
      continue;
    }
    const double scale = atom.weight / (total * h);
    for (std::size_t i = first; i <= last; ++i) v[i] += scratch[i - first] * scale;
  }
  return DensityGrid(grid, std::move(v));
}

double InjectionSchedule::pi_mass() const {
  return atoms.total_weight() + (density ? density->total_mass() : 0.0);
}

void InjectionSchedule::validate() const {
  if (I.is_identically_zero()) return;
  if (std::abs(pi_mass() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "injection law must have total mass 1");
  }
}

DensityGrid smear_pi(const Grid& grid, const InjectionSchedule& sched, double t) {
  DensityGrid out = smear_atoms(grid, sched.atoms, t);
  if (sched.density) {
    require_same_grid(grid, sched.density->grid());
    out = out + apply_kernel(*sched.density, t);
  }
  return out;
}

DensityGrid injection_increment(const Grid& grid, const InjectionSchedule& sched,
                                double tau, double t, int sub_steps) {
  if (!(tau < t)) throw Error(ErrorCode::InvalidArgument, "injection needs tau < t");
  if (sub_steps < 1) throw Error(ErrorCode::InvalidArgument, "sub_steps must be >= 1");
  std::vector<double> acc(grid.n_cells(), 0.0);
  const double dt = (t - tau) / sub_steps;
  for (int p = 0; p < sub_steps; ++p) {
    const double a = p == 0 ? tau : tau + p * dt;
    const double b = p + 1 == sub_steps ? t : tau + (p + 1) * dt;
    const double dI = sched.I(b) - sched.I(a);
    if (!(dI > 0.0)) continue;
    const double lag = t - 0.5 * (a + b);
    const DensityGrid bump = smear_pi(grid, sched, lag);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += dI * bump[i];
  }
  return DensityGrid(grid, std::move(acc));
}

DensityGrid inject(const DensityGrid& u, const InjectionSchedule& sched, double tau,
                   double t, int sub_steps) {
  if (sched.I(t) - sched.I(tau) == 0.0) return u;
  return u + injection_increment(u.grid(), sched, tau, t, sub_steps);
}

double mild_solution_residual(const DensityGrid& u0, const RemovalMeasure& beta,
                              const InjectionSchedule& sched, const DensityGrid& u_t,
                              double t, int sub_steps) {
  require_same_grid(u0.grid(), u_t.grid());
  const Grid& g = u0.grid();
  const auto auto_method = [&](double lag) {
    const double K = kTruncationSd * std::sqrt(lag) / g.h();
    return K > 64.0 ? ConvolutionMethod::Fft : ConvolutionMethod::Direct;
  };
  std::vector<double> rhs(g.n_cells(), 0.0);
  {
    const DensityGrid heat = apply_kernel(u0, t, auto_method(t));
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = heat[i];
  }
  if (t > 0.0 && sched.I(t) > 0.0) {
    const DensityGrid inj = injection_increment(g, sched, 0.0, t, sub_steps);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += inj[i];
  }
  for (const auto& e : beta.entries()) {
    if (e.time > t) break;
    const double lag = t - e.time;
    DensityGrid smeared(g);
    if (const auto* s = std::get_if<Slab>(&e.payload)) {
      require_same_grid(g, s->grid());
      smeared = apply_kernel(s->to_density(), lag, auto_method(lag));
    } else {
      smeared = smear_atoms(g, std::get<AtomList>(e.payload), lag);
    }
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= smeared[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) worst = std::max(worst, std::abs(u_t[i] - rhs[i]));
  return worst;
}

}  // namespace oralab
