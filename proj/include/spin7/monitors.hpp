#pragma once

// Monitored quantities along a flow: heat-kernel weighted energies (Theta,
// entropy, singular-set flag), Z(t), the |T|^2 evolution residual, and the
// small fits used to summarize a run.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "spin7/field.hpp"
#include "spin7/flow.hpp"
#include "spin7/torsion.hpp"

namespace spin7 {

// ---------------------------------------------------------------- kernels

/// 1D Gaussian of variance 2s periodized on a circle of length L, sampled at
/// offsets k*h, k = 0..n-1. Images are added until they fall below 1e-18 of
/// the peak.
inline std::vector<double> periodic_gaussian(int n, double length, double s, int images = 0) {
  const double h = length / n;
  if (images <= 0) images = 1 + static_cast<int>(std::ceil(std::sqrt(4.0 * s * 42.0) / length));
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * s);
  std::vector<double> w(n, 0.0);
  for (int k = 0; k < n; ++k) {
    // distance to the nearest image first, then outward
    const double x = k * h <= length / 2 ? k * h : k * h - length;
    double acc = 0.0;
    for (int m = -images; m <= images; ++m) {
      const double d = x + m * length;
      acc += std::exp(-d * d / (4.0 * s));
    }
    w[k] = norm * acc;
  }
  return w;
}

/// Circular convolution of a site field with one kernel per lattice axis,
/// out(x) = sum_y f(y) prod_d k_d(x_d - y_d).
inline std::vector<double> convolve_periodic(const LatticeGrid& grid, const std::vector<double>& f,
                                             const std::vector<std::vector<double>>& kernels) {
  std::vector<double> cur = f, next(f.size());
  for (int d = 0; d < grid.dims(); ++d) {
    const int n = grid.sizes()[d];
    const std::size_t stride = grid.stride(d);
    const std::size_t period = stride * n;
    const auto& k = kernels[d];
    for (std::size_t s = 0; s < f.size(); ++s) {
      const std::size_t base = s - (s % period);
      const int pos = static_cast<int>((s % period) / stride);
      const std::size_t lane = s % stride;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += k[(pos - j + n) % n] * cur[base + j * stride + lane];
      next[s] = acc;
    }
    std::swap(cur, next);
  }
  return cur;
}

enum class KernelKind { gaussian, uniform };

struct HeatKernelSpec {
  LatticeGrid::Coords center{};  // lattice coordinates of x0
  double t0 = 0.0;
  int images = 0;                // per active axis; 0 chooses automatically
  KernelKind kind = KernelKind::gaussian;
};

/// Per-axis kernel weights u for backward time s = t0 - t, normalized so
/// that sum_x u(x) * cell volume = 1. With `strict` the analytic lattice mass
/// must be 1 to 1e-6 before normalizing.
inline std::vector<std::vector<double>> kernel_weights(const LatticeGrid& grid, double s, int images,
                                                       bool strict, KernelKind kind = KernelKind::gaussian) {
  std::vector<std::vector<double>> k(grid.dims());
  double mass = 1.0;
  for (int d = 0; d < grid.dims(); ++d) {
    const int n = grid.sizes()[d];
    if (kind == KernelKind::uniform) {
      k[d].assign(n, 1.0 / grid.lengths()[d]);
    } else {
      k[d] = periodic_gaussian(n, grid.lengths()[d], s, images);
    }
    double m = 0.0;
    for (double w : k[d]) m += w;
    m *= grid.spacing(d);
    mass *= m;
    for (double& w : k[d]) w /= m;
  }
  if (strict && std::abs(mass - 1.0) > 1e-6)
    throw std::runtime_error("heat kernel mass off by " + std::to_string(mass - 1.0) +
                             " (kernel unresolved or too few images)");
  return k;
}

/// Theta_{(x0,t0)} at time t: (t0 - t) sum_x |T(x)|^2 u(x) * cell volume.
inline double theta(const LatticeGrid& grid, const std::vector<double>& density, const HeatKernelSpec& spec,
                    double t) {
  const double s = spec.t0 - t;
  if (!(s > 0.0)) throw std::invalid_argument("theta: need t < t0");
  const auto k = kernel_weights(grid, s, spec.images, spec.kind == KernelKind::gaussian, spec.kind);
  double acc = 0.0;
  for (std::size_t x = 0; x < density.size(); ++x) {
    const auto c = grid.coords(x);
    double u = 1.0;
    for (int d = 0; d < grid.dims(); ++d) {
      const int n = grid.sizes()[d];
      u *= k[d][((c[d] - spec.center[d]) % n + n) % n];
    }
    acc += density[x] * u;
  }
  return s * acc * grid.cell_volume();
}

struct EntropyResult {
  double value = 0.0;
  double time = 0.0;         // maximizing ladder time
  std::size_t site = 0;      // maximizing center
  double holder_bound = 0.0; // max_i t_i * sup u_i * 2E, an upper bound for value
};

/// max over all sites x and t_i = sigma 2^-i (i < levels) of t_i sum |T|^2 u_{(x,t_i)} * cell.
inline EntropyResult entropy_lambda(const LatticeGrid& grid, const std::vector<double>& density, double sigma,
                                    int levels = 13) {
  if (!(sigma > 0.0)) throw std::invalid_argument("entropy_lambda: sigma must be positive");
  EntropyResult r;
  const double cell = grid.cell_volume();
  double two_e = 0.0;
  for (double e : density) two_e += e * cell;
  for (int i = 0; i < levels; ++i) {
    const double t = sigma * std::ldexp(1.0, -i);
    const auto k = kernel_weights(grid, t, 0, false);
    double sup_u = 1.0;
    for (const auto& kd : k) sup_u *= *std::max_element(kd.begin(), kd.end());
    r.holder_bound = std::max(r.holder_bound, t * sup_u * two_e);
    const auto conv = convolve_periodic(grid, density, k);
    for (std::size_t x = 0; x < conv.size(); ++x) {
      const double v = t * conv[x] * cell;
      if (v > r.value) r = {v, t, x, r.holder_bound};
    }
  }
  return r;
}

/// A |T|^2 snapshot kept for the singular-set detector.
struct DensitySnapshot {
  double t = 0.0;
  std::vector<double> density;
};

/// Flags sites x with Theta_{(x,tau)}(Phi(tau - rho^2)) >= epsilon for every
/// rho = rho_max 2^-j, j < levels. Each time tau - rho^2 is served by the
/// nearest recorded snapshot (clamped to the history).
inline std::vector<bool> singular_detector(const LatticeGrid& grid, std::span<const DensitySnapshot> history,
                                           double tau, double epsilon, double rho_max, int levels = 8) {
  std::vector<bool> mask(grid.site_count(), true);
  if (history.empty()) throw std::invalid_argument("singular_detector: empty history");
  for (int j = 0; j < levels; ++j) {
    const double rho = rho_max * std::ldexp(1.0, -j);
    const double want = tau - rho * rho;
    const DensitySnapshot* best = &history.front();
    for (const auto& snap : history)
      if (snap.t <= tau && std::abs(snap.t - want) < std::abs(best->t - want)) best = &snap;
    const double s = tau - best->t;
    std::vector<double> th(grid.site_count(), 0.0);
    if (s > 0.0) {
      const auto conv = convolve_periodic(grid, best->density, kernel_weights(grid, s, 0, false));
      for (std::size_t x = 0; x < th.size(); ++x) th[x] = s * conv[x] * grid.cell_volume();
    }
    for (std::size_t x = 0; x < th.size(); ++x)
      if (!(th[x] >= epsilon)) mask[x] = false;
  }
  return mask;
}

// ---------------------------------------------------------------- Z(t)

/// Z(t) = (t_max - t) * 2E(t), the k = 1 case.
inline std::vector<double> z_series(std::span<const double> times, std::span<const double> energies, double t_max) {
  std::vector<double> z(times.size());
  for (std::size_t n = 0; n < z.size(); ++n) z[n] = (t_max - times[n]) * 2.0 * energies[n];
  return z;
}

/// Z(t) = (t_max - t) sum k |T|^2 * cell for a general positive weight k.
inline double z_value(const LatticeGrid& grid, const std::vector<double>& density, const std::vector<double>& k,
                      double t, double t_max) {
  double acc = 0.0;
  for (std::size_t x = 0; x < density.size(); ++x) acc += k[x] * density[x];
  return (t_max - t) * acc * grid.cell_volume();
}

/// Reaction-term rate 8 |q1 + q2| / |T|^2, maximized over sites: with it
/// d/dt int |T|^2 <= C int |T|^2 on the flat torus.
inline double reaction_rate(const TorsionField& t) {
  const auto& active = t.grid.active_dims();
  double c = 0.0;
  for (std::size_t s = 0; s < t.grid.site_count(); ++s) {
    const double e = t.norm_squared(s);
    if (e <= 0.0) continue;
    const QuarticTerms q = quartic_terms(t.at(s), active);
    c = std::max(c, 8.0 * std::abs(q.q1 + q.q2) / e);
  }
  return c;
}

/// max_n Z(t_n) / (Z(0) e^{C t_n}) over the first `count` samples; <= 1 means
/// the bound holds. Returns 0 when Z(0) = 0 and Z stays 0.
inline double z_bound_ratio(std::span<const double> times, std::span<const double> z, double c, std::size_t count) {
  double worst = 0.0;
  const std::size_t n = std::min(count, z.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double bound = z[0] * std::exp(c * (times[k] - times[0]));
    if (bound > 0.0)
      worst = std::max(worst, z[k] / bound);
    else if (z[k] > 0.0)
      worst = std::numeric_limits<double>::infinity();
  }
  return worst;
}

// ---------------------------------------------------------------- |T|^2 evolution

struct BochnerResidual {
  std::vector<double> residual;  // per site
  double max_abs = 0.0;
  double scale = 0.0;            // max |2 d/dt |T|^2|, for relative reporting
};

/// 2 d/dt |T|^2 - [2 Lap |T|^2 - 4 |nabla T|^2 - 16 q1 - 16 q2] at the middle of
/// three snapshots spaced dt apart (central difference in time).
inline BochnerResidual bochner_residual(const std::vector<double>& before, const StructureField& middle,
                                        const std::vector<double>& after, double dt, const Stencil& stencil) {
  if (before.size() != middle.size() || after.size() != middle.size())
    throw std::invalid_argument("bochner_residual: insufficient history");
  const TorsionField t = torsion_field(middle, stencil);
  const TorsionFieldGradient dt_field = torsion_gradient(t, stencil);
  const std::vector<double> e = t.density();
  const std::vector<double> lap = lattice_laplacian(middle.grid, stencil, e);
  const auto& active = middle.grid.active_dims();
  BochnerResidual r;
  r.residual.resize(middle.size());
  for (std::size_t s = 0; s < middle.size(); ++s) {
    const double dedt = (after[s] - before[s]) / (2.0 * dt);
    const QuarticTerms q = quartic_terms(t.at(s), active);
    const double rhs = 2.0 * lap[s] - 4.0 * dt_field.norm_squared(s) - 16.0 * q.q1 - 16.0 * q.q2;
    r.residual[s] = 2.0 * dedt - rhs;
    r.max_abs = std::max(r.max_abs, std::abs(r.residual[s]));
    r.scale = std::max(r.scale, std::abs(2.0 * dedt));
  }
  return r;
}

// ---------------------------------------------------------------- fits

/// Number of leading samples with sup|T| <= 2 sup|T|(0).
inline std::size_t doubling_window(std::span<const double> sup) {
  if (sup.empty()) return 0;
  std::size_t n = 0;
  while (n < sup.size() && sup[n] <= 2.0 * sup[0]) ++n;
  return n;
}

struct ExponentialFit {
  double rate = 0.0;       // y ~ A exp(-rate t)
  double amplitude = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log y against t over samples with y > 0.
inline ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> y) {
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(y[k] > 0.0)) continue;
    const double ly = std::log(y[k]);
    n += 1;
    st += t[k];
    sy += ly;
    stt += t[k] * t[k];
    sty += t[k] * ly;
  }
  ExponentialFit f;
  if (n < 2) return f;
  const double denom = n * stt - st * st;
  if (denom == 0.0) return f;
  const double slope = (n * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / n;
  f.rate = -slope;
  f.amplitude = std::exp(intercept);
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(y[k] > 0.0)) continue;
    const double ly = std::log(y[k]);
    ss_res += std::pow(ly - (intercept + slope * t[k]), 2);
    ss_tot += std::pow(ly - mean, 2);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

/// Largest E_{n+1} - E_n (positive means an increase).
inline double worst_energy_increase(std::span<const double> e) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < e.size(); ++n) worst = std::max(worst, e[n] - e[n - 1]);
  return e.size() < 2 ? 0.0 : worst;
}

/// max over tau1 < tau2 of Theta(tau2) / Theta(tau1); a pair of zeros counts as 1.
inline double worst_theta_ratio(std::span<const double> th) {
  if (th.size() < 2) return 1.0;
  double worst = 0.0, running_min = th[0];
  for (std::size_t n = 1; n < th.size(); ++n) {
    const double ratio = running_min > 0.0 ? th[n] / running_min
                                           : (th[n] > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    worst = std::max(worst, ratio);
    running_min = std::min(running_min, th[n]);
  }
  return worst;
}

}  // namespace spin7
