#pragma once

// Fiber coordinates: isometric Spin(7)-structures near the standard one,
// parametrized as exp(sum a_n B_n).Phi_0 with {B_n} an orthonormal basis of
// the 7-part of two-forms.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "spin7/cayley.hpp"
#include "spin7/form_spaces.hpp"
#include "spin7/lattice.hpp"

namespace spin7 {

inline constexpr int kFiberDim = 7;
using Fiber = std::array<double, kFiberDim>;

inline Matrix8 to_matrix(const TwoForm& beta) {
  Matrix8 m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m(i, j) = beta(i, j);
  return m;
}

inline TwoForm to_two_form(const Matrix8& m) {
  TwoForm beta;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) beta(i, j) = m(i, j);
  return beta;
}

struct Omega27Basis {
  std::array<TwoForm, kFiberDim> element;
  std::array<Matrix8, kFiberDim> matrix;

  /// rho(a) = sum_n a_n B_n as a skew 8x8 matrix.
  Matrix8 generator(const Fiber& a) const {
    Matrix8 m = Matrix8::Zero();
    for (int n = 0; n < kFiberDim; ++n) m += a[n] * matrix[n];
    return m;
  }

  TwoForm combine(const Fiber& a) const { return to_two_form(generator(a)); }

  /// Frobenius coordinates <beta, B_n>.
  Fiber coordinates(const Matrix8& beta) const {
    Fiber a{};
    for (int n = 0; n < kFiberDim; ++n) a[n] = (beta.array() * matrix[n].array()).sum();
    return a;
  }

  /// FNV-1a over the IEEE-754 bytes of all basis components.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& b : element)
      for (double x : b.components()) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        for (int byte = 0; byte < 8; ++byte) {
          h ^= (bits >> (8 * byte)) & 0xffu;
          h *= 1099511628211ull;
        }
      }
    return h;
  }
};

/// pi_7 applied to dx^i ^ dx^j in lexicographic order, then modified
/// Gram-Schmidt (Frobenius inner product) with drop tolerance 1e-8.
/// Throws std::runtime_error unless exactly 7 vectors survive.
inline Omega27Basis omega27_basis(const FourForm& phi) {
  std::vector<TwoForm> kept;
  for (const auto& pr : kPairs) {
    TwoForm e;
    e(pr[0], pr[1]) = 1.0;
    e(pr[1], pr[0]) = -1.0;
    TwoForm v = project_two_form(e, TwoFormPart::seven, phi);
    for (const auto& w : kept) v -= v.dot(w) * w;
    const double n = v.norm();
    if (n > 1e-8) kept.push_back((1.0 / n) * v);
  }
  if (kept.size() != kFiberDim)
    throw std::runtime_error("omega27_basis: Gram-Schmidt produced " + std::to_string(kept.size()) +
                             " vectors instead of 7");
  Omega27Basis basis;
  for (int n = 0; n < kFiberDim; ++n) {
    basis.element[n] = kept[n];
    basis.matrix[n] = to_matrix(kept[n]);
  }
  return basis;
}

/// The basis built from the standard Cayley form, computed once.
inline const Omega27Basis& standard_basis() {
  static const Omega27Basis basis = omega27_basis(standard_phi());
  return basis;
}

inline Matrix8 rotation_from_fiber(const Fiber& a, const Omega27Basis& basis) {
  return basis.generator(a).exp();
}

/// exp(X) by Taylor series with scaling and squaring, for the small
/// generators of single flow steps (||X||_inf <= 1/2 after scaling, series
/// truncated below 1e-18). A zero generator gives the identity exactly.
inline Matrix8 small_exponential(const Matrix8& x) {
  const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  const int squarings = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const Matrix8 a = std::ldexp(1.0, -squarings) * x;
  Matrix8 result = Matrix8::Identity() + a;
  Matrix8 term = a;
  for (int k = 2; k < 30; ++k) {
    term = (term.lazyProduct(a) / k).eval();
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result.lazyProduct(result).eval();
  return result;
}

struct FiberStructure {
  FourForm phi;
  Matrix8 rotation;
};

/// Q_a = exp(rho(a)), Phi_a = Q_a.Phi_0, so that d/dt Phi_{ta} at 0 equals
/// rho(a) <> Phi_0.
inline FiberStructure structure_from_fiber(const Fiber& a, const Omega27Basis& basis = standard_basis()) {
  FiberStructure s;
  s.rotation = rotation_from_fiber(a, basis);
  s.phi = unpack(act_on_standard(s.rotation));
  return s;
}

/// Inverse of the exponential chart: Newton iteration for a with
/// exp(rho(a)).Phi_0 = target, starting from `hint`.
///
/// The Jacobian on the 7-part is sum_j K^j / (2j+1)! with
/// K_nm = <B_n, [X, [X, B_m]]>, valid because the 7-part is a symmetric
/// complement of spin(7) in so(8).
inline Fiber fiber_from_structure(const PackedFourForm& target, const Omega27Basis& basis = standard_basis(),
                                  Fiber hint = {}, double tolerance = 1e-14, int max_iterations = 60) {
  Fiber a = hint;
  const FourForm target_dense = unpack(target);
  for (int it = 0; it < max_iterations; ++it) {
    const Matrix8 x = basis.generator(a);
    const Matrix8 q = x.exp();
    const PackedFourForm current = act_on_standard(q);
    double err = 0.0;
    for (int c = 0; c < kQuadCount; ++c) err = std::max(err, std::abs(target[c] - current[c]));
    if (err < tolerance) break;
    const FourForm current_dense = unpack(current);
    const TwoForm delta = inverse_diamond_on_7(target_dense - current_dense, current_dense);
    const Matrix8 pulled = q.transpose() * to_matrix(delta) * q;
    const Fiber y = basis.coordinates(pulled);

    Eigen::Matrix<double, kFiberDim, kFiberDim> k;
    for (int m = 0; m < kFiberDim; ++m) {
      const Matrix8 inner = x * basis.matrix[m] - basis.matrix[m] * x;
      const Matrix8 outer = x * inner - inner * x;
      const Fiber col = basis.coordinates(outer);
      for (int n = 0; n < kFiberDim; ++n) k(n, m) = col[n];
    }
    Eigen::Matrix<double, kFiberDim, kFiberDim> jac = Eigen::Matrix<double, kFiberDim, kFiberDim>::Identity();
    Eigen::Matrix<double, kFiberDim, kFiberDim> term = jac;
    for (int j = 1; j < 40; ++j) {
      term = term * k / ((2.0 * j) * (2.0 * j + 1.0));
      jac += term;
      if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    Eigen::Matrix<double, kFiberDim, 1> rhs;
    for (int n = 0; n < kFiberDim; ++n) rhs[n] = y[n];
    const Eigen::Matrix<double, kFiberDim, 1> step = jac.fullPivLu().solve(rhs);
    for (int n = 0; n < kFiberDim; ++n) a[n] += step[n];
  }
  return a;
}

// ---------------------------------------------------------------- fields

struct FiberField {
  LatticeGrid grid;
  std::vector<Fiber> values;

  explicit FiberField(LatticeGrid g) : grid(std::move(g)), values(grid.site_count(), Fiber{}) {}
};

/// Band-limited fiber field given by Fourier modes on the continuum torus,
/// so the same field can be sampled on grids of any resolution.
struct FourierFiber {
  struct Mode {
    std::array<int, kMaxActiveDims> wavenumber{};  // integer, per active axis
    int component = 0;                              // fiber coordinate n
    double coefficient = 0.0;
    double phase = 0.0;
  };

  std::vector<Mode> modes;
  std::vector<double> lengths;  // torus side per active axis

  double phase_at(const Mode& m, const std::array<double, kMaxActiveDims>& x) const {
    double arg = m.phase;
    for (std::size_t d = 0; d < lengths.size(); ++d)
      arg += 2.0 * std::numbers::pi * m.wavenumber[d] * x[d] / lengths[d];
    return arg;
  }

  Fiber value(const std::array<double, kMaxActiveDims>& x) const {
    Fiber a{};
    for (const auto& m : modes) a[m.component] += m.coefficient * std::cos(phase_at(m, x));
    return a;
  }

  /// d a / d x_axis.
  Fiber derivative(const std::array<double, kMaxActiveDims>& x, int axis) const {
    Fiber a{};
    for (const auto& m : modes)
      a[m.component] -= m.coefficient * 2.0 * std::numbers::pi * m.wavenumber[axis] / lengths[axis] *
                        std::sin(phase_at(m, x));
    return a;
  }

  /// Samples the modes, capping |a| at pi/2 per site (radial rescale).
  FiberField sample(const LatticeGrid& grid) const {
    FiberField field(grid);
    for (std::size_t s = 0; s < grid.site_count(); ++s) {
      std::array<double, kMaxActiveDims> x{};
      for (int d = 0; d < grid.dims(); ++d) x[d] = grid.position(s, d);
      Fiber a = value(x);
      double n2 = 0.0;
      for (double v : a) n2 += v * v;
      const double cap = std::numbers::pi / 2.0;
      if (n2 > cap * cap)
        for (double& v : a) v *= cap / std::sqrt(n2);
      field.values[s] = a;
    }
    return field;
  }
};

struct GeneratorSpec {
  int modes = 3;             // Fourier modes per fiber component
  double amplitude = 0.05;   // sum of |coefficients| per component
  std::uint64_t seed = 1;
  int max_wavenumber = 2;    // |k_d| <= max_wavenumber on every axis
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Deterministic random modes: each component gets `modes` waves with nonzero
/// integer wavevectors and coefficients scaled so their absolute values sum to
/// the amplitude.
inline FourierFiber random_fourier_fiber(const LatticeGrid& grid, const GeneratorSpec& spec) {
  if (!(spec.amplitude >= 0.0)) throw std::invalid_argument("generator: amplitude must be >= 0");
  if (spec.modes < 0) throw std::invalid_argument("generator: modes must be >= 0");
  if (spec.max_wavenumber < 1) throw std::invalid_argument("generator: max_wavenumber must be >= 1");
  for (int n : grid.sizes())
    if (2 * spec.max_wavenumber >= n) throw std::invalid_argument("generator: modes beyond Nyquist");

  FourierFiber f;
  f.lengths = grid.lengths();
  std::mt19937_64 rng(spec.seed);
  const int span = 2 * spec.max_wavenumber + 1;
  for (int c = 0; c < kFiberDim; ++c) {
    std::vector<FourierFiber::Mode> comp;
    double total = 0.0;
    for (int j = 0; j < spec.modes; ++j) {
      FourierFiber::Mode m;
      m.component = c;
      bool nonzero = false;
      while (!nonzero) {
        for (int d = 0; d < grid.dims(); ++d) {
          m.wavenumber[d] = static_cast<int>(rng() % span) - spec.max_wavenumber;
          nonzero = nonzero || m.wavenumber[d] != 0;
        }
      }
      m.coefficient = 0.5 + 0.5 * detail::unit_uniform(rng);
      m.phase = 2.0 * std::numbers::pi * detail::unit_uniform(rng);
      total += m.coefficient;
      comp.push_back(m);
    }
    for (auto& m : comp) {
      m.coefficient *= spec.amplitude / total;
      f.modes.push_back(m);
    }
  }
  return f;
}

inline FiberField seeded_field_generator(const LatticeGrid& grid, const GeneratorSpec& spec) {
  return random_fourier_fiber(grid, spec).sample(grid);
}

}  // namespace spin7
