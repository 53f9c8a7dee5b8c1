#pragma once

// Pointwise torsion algebra and the flat-background constraint residuals.
//
// Index naming follows T_{m;ab}: the direction m comes first, the two-form
// slot (a, b) second. dT[i].slice[j](a, b) stores the genuine derivative
// nabla_i T_{j;ab}; there is no second-derivative reading of the semicolon.

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spin7/cayley.hpp"
#include "spin7/form_spaces.hpp"
#include "spin7/tensor.hpp"

namespace spin7 {

/// One 7-part two-form per direction m.
struct TorsionTensor {
  std::array<TwoForm, kDim> slice{};

  double& operator()(int m, int a, int b) { return slice[m](a, b); }
  double operator()(int m, int a, int b) const { return slice[m](a, b); }

  /// |T|^2 = sum_{m,a,b} T_{m;ab}^2, no combinatorial factor.
  double norm_squared() const {
    double acc = 0.0;
    for (const auto& s : slice) acc += s.norm_squared();
    return acc;
  }
  double norm() const { return std::sqrt(norm_squared()); }
};

/// nabla_i T_{j;ab}, stored as d[i].slice[j](a, b).
struct TorsionGradient {
  std::array<TorsionTensor, kDim> d{};

  double operator()(int i, int j, int a, int b) const { return d[i].slice[j](a, b); }
  double& operator()(int i, int j, int a, int b) { return d[i].slice[j](a, b); }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& t : d) acc += t.norm_squared();
    return acc;
  }
};

/// nabla_m Phi for m = 0..7, heap-backed (8 x 32 KiB).
using FormGradient = std::vector<FourForm>;

/// T_{m;ab} = 1/96 (nabla_m Phi_ajkl) Phi_bjkl, antisymmetrized in (a, b).
inline TorsionTensor torsion_from_gradient(std::span<const FourForm> dphi, const FourForm& phi) {
  TorsionTensor t;
  for (std::size_t m = 0; m < dphi.size() && m < kDim; ++m)
    t.slice[m] = inverse_diamond_on_7(dphi[m], phi);
  return t;
}

/// nabla_m Phi = T_m <> Phi.
inline FormGradient gradient_from_torsion(const TorsionTensor& t, const FourForm& phi) {
  FormGradient out(kDim);
  for (int m = 0; m < kDim; ++m) out[m] = diamond(t.slice[m], phi);
  return out;
}

/// Largest 7-part eigen-relation defect over the slices.
inline double omega27_defect(const TorsionTensor& t, const FourForm& phi) {
  double worst = 0.0;
  for (const auto& s : t.slice) worst = std::max(worst, two_form_eigen_residual(s, TwoFormPart::seven, phi));
  return worst;
}

/// Max-norm of a residual plus, on request, the full tensor.
struct ResidualReport {
  double max_abs = 0.0;
  std::vector<double> full;
};

/// nabla_i T_{j;ab} - nabla_j T_{i;ab} - 2 T_{i;am} T_{j;mb} + 2 T_{j;am} T_{i;mb}.
/// Flat background: the curvature terms are identically zero.
inline ResidualReport bianchi_residual(const TorsionTensor& t, const TorsionGradient& dt,
                                       bool keep_full = false) {
  ResidualReport r;
  if (keep_full) r.full.assign(4096, 0.0);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) {
          double acc = dt(i, j, a, b) - dt(j, i, a, b);
          for (int m = 0; m < kDim; ++m) acc -= 2.0 * (t(i, a, m) * t(j, m, b) - t(j, a, m) * t(i, m, b));
          r.max_abs = std::max(r.max_abs, std::abs(acc));
          if (keep_full) r.full[((i * kDim + j) * kDim + a) * kDim + b] = acc;
        }
  return r;
}

/// 4 nabla_i T_{a;ja} - 4 nabla_a T_{i;ja} - 8 T_{i;jb} T_{a;ba} + 8 T_{a;jb} T_{i;ba},
/// which equals R_ij and therefore vanishes on the flat torus.
inline Matrix8 ricci_residual(const TorsionTensor& t, const TorsionGradient& dt) {
  Matrix8 r = Matrix8::Zero();
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double acc = 0.0;
      for (int a = 0; a < kDim; ++a) {
        acc += 4.0 * dt(i, a, j, a) - 4.0 * dt(a, i, j, a);
        for (int b = 0; b < kDim; ++b) acc += -8.0 * t(i, j, b) * t(a, b, a) + 8.0 * t(a, j, b) * t(i, b, a);
      }
      r(i, j) = acc;
    }
  return r;
}

/// Trace of ricci_residual:
/// 4 nabla_i T_{a;ia} - 4 nabla_a T_{i;ia} - 8 T_{i;ib} T_{a;ba} + 8 T_{a;ib} T_{i;ba}.
inline double scalar_residual(const TorsionTensor& t, const TorsionGradient& dt) {
  double acc = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int a = 0; a < kDim; ++a) {
      acc += 4.0 * dt(i, a, i, a) - 4.0 * dt(a, i, i, a);
      for (int b = 0; b < kDim; ++b) acc += -8.0 * t(i, i, b) * t(a, b, a) + 8.0 * t(a, i, b) * t(i, b, a);
    }
  return acc;
}

/// The two quartic reaction terms of the |T|^2 evolution:
/// q1 = T_{a;bp} T_{m;bc} T_{a;pq} T_{m;qc},  q2 = T_{a;bp} T_{m;bc} T_{a;cq} T_{m;pq}.
struct QuarticTerms {
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Only the listed directions are summed over (the others carry zero slices).
inline QuarticTerms quartic_terms(const TorsionTensor& t, std::span<const int> directions) {
  QuarticTerms q;
  Eigen::Matrix<double, kDim, kDim> ta, tm;
  for (int a : directions) {
    for (int r = 0; r < kDim; ++r)
      for (int c = 0; c < kDim; ++c) ta(r, c) = t(a, r, c);
    for (int m : directions) {
      for (int r = 0; r < kDim; ++r)
        for (int c = 0; c < kDim; ++c) tm(r, c) = t(m, r, c);
      // q1: sum_{b,p,c,q} Ta_bp Tm_bc Ta_pq Tm_qc = sum (Ta^T Tm)_pc (Ta Tm)_pc
      const auto atm = (ta.transpose() * tm).eval();
      q.q1 += (atm.array() * (ta * tm).array()).sum();
      // q2: sum Ta_bp Tm_bc Ta_cq Tm_pq = sum_{p,c} (Ta^T Tm)_pc (Tm Ta^T)_pc
      q.q2 += (atm.array() * (tm * ta.transpose()).array()).sum();
    }
  }
  return q;
}

}  // namespace spin7
