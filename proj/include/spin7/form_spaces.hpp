#pragma once

// Spin(7)-irreducible splittings of 2-, 3- and 4-forms, the diamond operator
// and its triple-contraction inverse on the 7-dimensional part.

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "spin7/cayley.hpp"
#include "spin7/forms.hpp"
#include "spin7/tensor.hpp"

namespace spin7 {

enum class TwoFormPart { seven, twenty_one };

/// (beta . Phi)_ij = beta_ab Phi_abij. Eigenvalue -6 on the 7-part, 2 on the 21-part.
inline TwoForm contract_with_phi(const TwoForm& beta, const FourForm& phi) {
  TwoForm out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double acc = 0.0;
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) acc += beta(a, b) * phi(a, b, i, j);
      out(i, j) = acc;
    }
  return out;
}

inline TwoForm project_two_form(const TwoForm& beta, TwoFormPart part, const FourForm& phi) {
  const TwoForm bp = contract_with_phi(beta, phi);
  return part == TwoFormPart::seven ? 0.25 * beta - 0.125 * bp : 0.75 * beta + 0.125 * bp;
}

/// max |beta_ab Phi_abij - eigenvalue * beta_ij|.
inline double two_form_eigen_residual(const TwoForm& beta, TwoFormPart part, const FourForm& phi) {
  const double lambda = part == TwoFormPart::seven ? -6.0 : 2.0;
  return max_abs_difference(contract_with_phi(beta, phi), lambda * beta);
}

/// beta_ab Phi_bpqr - (beta_pi Phi_iqra + beta_qi Phi_irpa + beta_ri Phi_ipqa),
/// which vanishes exactly on the 21-part (the spin(7) Lie algebra).
inline double lie_algebra_identity_residual(const TwoForm& beta, const FourForm& phi) {
  double worst = 0.0;
  for (int a = 0; a < kDim; ++a)
    for (int p = 0; p < kDim; ++p)
      for (int q = 0; q < kDim; ++q)
        for (int r = 0; r < kDim; ++r) {
          double lhs = 0.0, rhs = 0.0;
          for (int b = 0; b < kDim; ++b) lhs += beta(a, b) * phi(b, p, q, r);
          for (int i = 0; i < kDim; ++i)
            rhs += beta(p, i) * phi(i, q, r, a) + beta(q, i) * phi(i, r, p, a) +
                   beta(r, i) * phi(i, p, q, a);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return worst;
}

// ---------------------------------------------------------------- 3-forms

/// (X _| Phi)_ijk = X_l Phi_ijkl.
inline ThreeForm interior(const Vector8& x, const FourForm& phi) {
  ThreeForm out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        double acc = 0.0;
        for (int l = 0; l < kDim; ++l) acc += x[l] * phi(i, j, k, l);
        out(i, j, k) = acc;
      }
  return out;
}

/// gamma_ijk Phi_ijkl.
inline Vector8 contract_three_form(const ThreeForm& gamma, const FourForm& phi) {
  Vector8 out{};
  for (int l = 0; l < kDim; ++l) {
    double acc = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) acc += gamma(i, j, k) * phi(i, j, k, l);
    out[l] = acc;
  }
  return out;
}

struct ThreeFormSplit {
  Vector8 vector{};   // X with gamma_8 = X _| Phi
  ThreeForm rest;     // the 48-part, gamma_ijk Phi_ijkl = 0
};

inline ThreeFormSplit decompose_three_form(const ThreeForm& gamma, const FourForm& phi) {
  ThreeFormSplit split;
  split.vector = contract_three_form(gamma, phi);
  for (double& x : split.vector) x /= 42.0;
  split.rest = gamma - interior(split.vector, phi);
  return split;
}

// ---------------------------------------------------------------- 4-forms

/// Lambda_Phi(sigma)_ijkl = (s.P)_ijkl + (s.P)_iklj + (s.P)_iljk + (s.P)_jkil
/// + (s.P)_jlki + (s.P)_klij with (s.P)_ijkl = sigma_ijmn Phi_mnkl.
inline FourForm lambda_phi(const FourForm& sigma, const FourForm& phi) {
  // sigma and Phi as 64x64 matrices over index pairs
  Eigen::Matrix<double, 64, 64> s, p;
  for (int a = 0; a < 64; ++a)
    for (int b = 0; b < 64; ++b) {
      s(a, b) = sigma[a * 64 + b];
      p(a, b) = phi[a * 64 + b];
    }
  const Eigen::Matrix<double, 64, 64> sp = s * p;
  auto at = [&](int i, int j, int k, int l) { return sp(i * kDim + j, k * kDim + l); };
  FourForm out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l)
          out(i, j, k, l) = at(i, j, k, l) + at(i, k, l, j) + at(i, l, j, k) + at(j, k, i, l) +
                            at(j, l, k, i) + at(k, l, i, j);
  return out;
}

/// Lambda_Phi eigenvalues, ordered as the parts of FourFormSplit.
inline constexpr std::array<double, 4> kLambdaEigenvalues{-24.0, -12.0, 4.0, 0.0};
inline constexpr std::array<int, 4> kFourFormPartDimensions{1, 7, 27, 35};

struct FourFormSplit {
  std::array<FourForm, 4> parts;  // dimensions 1, 7, 27, 35

  const FourForm& one() const { return parts[0]; }
  const FourForm& seven() const { return parts[1]; }
  const FourForm& twenty_seven() const { return parts[2]; }
  const FourForm& thirty_five() const { return parts[3]; }
};

/// Spectral projectors of Lambda_Phi by Lagrange interpolation on its four
/// eigenvalues.
inline FourFormSplit decompose_four_form(const FourForm& sigma, const FourForm& phi) {
  const FourForm l1 = lambda_phi(sigma, phi);
  const FourForm l2 = lambda_phi(l1, phi);
  const FourForm l3 = lambda_phi(l2, phi);
  FourFormSplit split;
  for (int part = 0; part < 4; ++part) {
    // prod_{mu != lambda} (x - mu) = x^3 - e1 x^2 + e2 x - e3
    double e1 = 0.0, e2 = 0.0, e3 = 1.0, denom = 1.0;
    std::array<double, 3> mu{};
    int n = 0;
    for (int other = 0; other < 4; ++other) {
      if (other == part) continue;
      mu[n++] = kLambdaEigenvalues[other];
      denom *= kLambdaEigenvalues[part] - kLambdaEigenvalues[other];
    }
    e1 = mu[0] + mu[1] + mu[2];
    e2 = mu[0] * mu[1] + mu[0] * mu[2] + mu[1] * mu[2];
    e3 = mu[0] * mu[1] * mu[2];
    FourForm& out = split.parts[part];
    for (std::size_t f = 0; f < FourForm::size; ++f)
      out[f] = (l3[f] - e1 * l2[f] + e2 * l1[f] - e3 * sigma[f]) / denom;
  }
  return split;
}

/// (A <> Phi)_ijkl = A_ip Phi_pjkl + A_jp Phi_ipkl + A_kp Phi_ijpl + A_lp Phi_ijkp.
inline FourForm diamond(const Endomorphism& a, const FourForm& phi) {
  FourForm out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double acc = 0.0;
          for (int p = 0; p < kDim; ++p)
            acc += a(i, p) * phi(p, j, k, l) + a(j, p) * phi(i, p, k, l) +
                   a(k, p) * phi(i, j, p, l) + a(l, p) * phi(i, j, k, p);
          out(i, j, k, l) = acc;
        }
  return out;
}

inline FourForm diamond(const TwoForm& beta, const FourForm& phi) {
  return diamond(as_endomorphism(beta), phi);
}

/// sigma_pijk Phi_qijk, antisymmetrized in (p, q). Returns 96 beta on
/// sigma = beta <> Phi with beta in the 7-part.
inline TwoForm triple_contract(const FourForm& sigma, const FourForm& phi) {
  TwoForm m;
  for (int p = 0; p < kDim; ++p)
    for (int q = 0; q < kDim; ++q) {
      double acc = 0.0;
      for (int f = 0; f < 512; ++f) acc += sigma[p * 512 + f] * phi[q * 512 + f];
      m(p, q) = acc;
    }
  return antisymmetrize(m);
}

/// The beta in the 7-part with beta <> Phi equal to the 7-part of sigma.
inline TwoForm inverse_diamond_on_7(const FourForm& sigma, const FourForm& phi) {
  return (1.0 / 96.0) * triple_contract(sigma, phi);
}

// ------------------------------------------------- representation matrices

/// Matrix of Lambda_Phi on the coordinate 4-forms dx^{quad}, 70x70.
inline Eigen::MatrixXd lambda_matrix(const FourForm& phi) {
  Eigen::MatrixXd m(kQuadCount, kQuadCount);
  for (int c = 0; c < kQuadCount; ++c) {
    const PackedFourForm image = pack(lambda_phi(four_form_from_monomial(kQuads[c], 1.0), phi));
    for (int r = 0; r < kQuadCount; ++r) m(r, c) = image[r];
  }
  return m;
}

/// Matrix of A -> A <> Phi from the 64 coordinate endomorphisms to packed
/// 4-forms, 70x64. Columns are ordered by flat index i*8+p of A_ip.
inline Eigen::MatrixXd diamond_matrix(const FourForm& phi) {
  Eigen::MatrixXd m(kQuadCount, 64);
  for (int c = 0; c < 64; ++c) {
    Endomorphism a;
    a[c] = 1.0;
    const PackedFourForm image = pack(diamond(a, phi));
    for (int r = 0; r < kQuadCount; ++r) m(r, c) = image[r];
  }
  return m;
}

}  // namespace spin7
