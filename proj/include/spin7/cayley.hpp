#pragma once

// The Cayley 4-form on R^8, its SO(8) orbit, and the contraction-identity
// catalogue.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "spin7/forms.hpp"
#include "spin7/tensor.hpp"

namespace spin7 {

using Matrix8 = Eigen::Matrix<double, kDim, kDim>;

struct CayleyTerm {
  int sign;
  Quad indices;  // as written, not necessarily increasing
};

// Phi_p = dx^0123 - dx^0167 - ... , 14 terms.
inline constexpr std::array<CayleyTerm, 14> kCayleyTerms{{
    {+1, {0, 1, 2, 3}}, {-1, {0, 1, 6, 7}}, {-1, {0, 5, 2, 7}}, {-1, {0, 5, 6, 3}},
    {-1, {0, 4, 1, 5}}, {-1, {0, 4, 2, 6}}, {-1, {0, 4, 3, 7}}, {+1, {4, 5, 6, 7}},
    {-1, {4, 5, 2, 3}}, {-1, {4, 1, 6, 3}}, {-1, {4, 1, 2, 7}}, {-1, {2, 6, 3, 7}},
    {-1, {1, 5, 3, 7}}, {-1, {1, 5, 2, 6}},
}};

/// One of the 14 terms rewritten on an increasing index set.
struct SortedCayleyTerm {
  int quad;
  int sign;
};

namespace detail {

constexpr std::array<SortedCayleyTerm, 14> sorted_cayley_terms() {
  std::array<SortedCayleyTerm, 14> out{};
  for (int t = 0; t < 14; ++t) {
    const auto& idx = kCayleyTerms[t].indices;
    const PackedSlot slot = packed_slot(idx[0], idx[1], idx[2], idx[3]);
    out[t] = {slot.quad, kCayleyTerms[t].sign * slot.sign};
  }
  return out;
}

}  // namespace detail

inline constexpr auto kSortedCayleyTerms = detail::sorted_cayley_terms();

inline PackedFourForm standard_phi_packed() {
  PackedFourForm p{};
  for (const auto& t : kSortedCayleyTerms) p[t.quad] = t.sign;
  return p;
}

/// The standard Cayley form, densely antisymmetrized (336 entries of +-1).
inline FourForm standard_phi() { return unpack(standard_phi_packed()); }

/// (Q.sigma)_ijkl = Q_ip Q_jq Q_kr Q_ls sigma_pqrs. For Q = exp(tA) the
/// derivative at t = 0 is A <> sigma.
inline FourForm act(const Matrix8& q, const FourForm& sigma) {
  // Contract the last slot and rotate it to the front, four times.
  FourForm a = sigma;
  FourForm b;
  for (int pass = 0; pass < 4; ++pass) {
    for (int l = 0; l < kDim; ++l)
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
          for (int k = 0; k < kDim; ++k) {
            double acc = 0.0;
            for (int p = 0; p < kDim; ++p) acc += q(l, p) * a(i, j, k, p);
            b(l, i, j, k) = acc;
          }
    std::swap(a, b);
  }
  return a;
}

namespace detail {

constexpr int pair_slot(int a, int b) { return a * (2 * kDim - a - 1) / 2 + (b - a - 1); }

struct MinorProduct {
  std::int8_t top, bottom;  // column pairs of the two 2x2 minors
  std::int8_t sign;         // Laplace sign times the Cayley term sign
};

// Laplace expansion of each term's 4x4 minor along its first two rows:
// 14 terms x 6 column splits.
constexpr std::array<MinorProduct, 84> minor_products() {
  constexpr int splits[6][5] = {{0, 1, 2, 3, +1}, {0, 2, 1, 3, -1}, {0, 3, 1, 2, +1},
                                {1, 2, 0, 3, +1}, {1, 3, 0, 2, -1}, {2, 3, 0, 1, +1}};
  std::array<MinorProduct, 84> out{};
  int n = 0;
  for (const auto& term : kSortedCayleyTerms) {
    const auto& c = kQuads[term.quad];
    for (const auto& s : splits)
      out[n++] = {static_cast<std::int8_t>(pair_slot(c[s[0]], c[s[1]])),
                  static_cast<std::int8_t>(pair_slot(c[s[2]], c[s[3]])),
                  static_cast<std::int8_t>(s[4] * term.sign)};
  }
  return out;
}

inline constexpr auto kMinorProducts = minor_products();

}  // namespace detail

/// Q.Phi_standard in packed form, as a signed sum of 4x4 minors of Q.
inline PackedFourForm act_on_standard(const Matrix8& q) {
  // 2x2 minors M(row pair, col pair), kept in both orientations so that the
  // loops below run over contiguous memory.
  alignas(64) double by_row[kPairCount][kPairCount];
  alignas(64) double by_col[kPairCount][kPairCount];
  for (int r = 0; r < kPairCount; ++r) {
    const int r0 = kPairs[r][0], r1 = kPairs[r][1];
    for (int c = 0; c < kPairCount; ++c) {
      const int c0 = kPairs[c][0], c1 = kPairs[c][1];
      const double m = q(r0, c0) * q(r1, c1) - q(r0, c1) * q(r1, c0);
      by_row[r][c] = m;
      by_col[c][r] = m;
    }
  }
  // Y = M W with W the signed Laplace pattern; column bottom of Y collects
  // sign * column top of M. Each output is then Y(top rows) . M(bottom rows).
  alignas(64) double y_col[kPairCount][kPairCount] = {};
  for (const auto& m : detail::kMinorProducts) {
    const double sign = m.sign;
    const double* src = by_col[m.top];
    double* dst = y_col[m.bottom];
    for (int r = 0; r < kPairCount; ++r) dst[r] += sign * src[r];
  }
  alignas(64) double y_row[kPairCount][kPairCount];
  for (int c = 0; c < kPairCount; ++c)
    for (int r = 0; r < kPairCount; ++r) y_row[r][c] = y_col[c][r];
  PackedFourForm out{};
  for (int rq = 0; rq < kQuadCount; ++rq) {
    const auto& rows = kQuads[rq];
    const double* top = y_row[detail::pair_slot(rows[0], rows[1])];
    const double* bottom = by_row[detail::pair_slot(rows[2], rows[3])];
    double acc = 0.0;
    for (int c = 0; c < kPairCount; ++c) acc += top[c] * bottom[c];
    out[rq] = acc;
  }
  return out;
}

/// Max-norm residuals of the four quadratic contraction identities.
struct IdentityResiduals {
  double three_index = 0.0;  // Phi_ijkl Phi_abcl = g g g terms - g Phi terms
  double two_index = 0.0;    // Phi_ijkl Phi_abkl = 6 g g - 6 g g - 4 Phi_ijab
  double one_index = 0.0;    // Phi_ijkl Phi_ajkl = 42 g_ia
  double full = 0.0;         // Phi_ijkl Phi_ijkl = 336

  double max() const { return std::max({three_index, two_index, one_index, full}); }
};

inline IdentityResiduals contraction_identity_residuals(const FourForm& phi) {
  auto g = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  IdentityResiduals r;

  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b)
            for (int c = 0; c < kDim; ++c) {
              double lhs = 0.0;
              for (int l = 0; l < kDim; ++l) lhs += phi(i, j, k, l) * phi(a, b, c, l);
              const double rhs =
                  g(i, a) * g(j, b) * g(k, c) + g(i, b) * g(j, c) * g(k, a) +
                  g(i, c) * g(j, a) * g(k, b) - g(i, a) * g(j, c) * g(k, b) -
                  g(i, b) * g(j, a) * g(k, c) - g(i, c) * g(j, b) * g(k, a) -
                  g(i, a) * phi(j, k, b, c) - g(i, b) * phi(j, k, c, a) - g(i, c) * phi(j, k, a, b) -
                  g(j, a) * phi(k, i, b, c) - g(j, b) * phi(k, i, c, a) - g(j, c) * phi(k, i, a, b) -
                  g(k, a) * phi(i, j, b, c) - g(k, b) * phi(i, j, c, a) - g(k, c) * phi(i, j, a, b);
              r.three_index = std::max(r.three_index, std::abs(lhs - rhs));
            }

  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) {
          double lhs = 0.0;
          for (int k = 0; k < kDim; ++k)
            for (int l = 0; l < kDim; ++l) lhs += phi(i, j, k, l) * phi(a, b, k, l);
          const double rhs = 6 * g(i, a) * g(j, b) - 6 * g(i, b) * g(j, a) - 4 * phi(i, j, a, b);
          r.two_index = std::max(r.two_index, std::abs(lhs - rhs));
        }

  for (int i = 0; i < kDim; ++i)
    for (int a = 0; a < kDim; ++a) {
      double lhs = 0.0;
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k)
          for (int l = 0; l < kDim; ++l) lhs += phi(i, j, k, l) * phi(a, j, k, l);
      r.one_index = std::max(r.one_index, std::abs(lhs - 42.0 * g(i, a)));
    }

  // 4096 squares: accumulate in extended precision so the summation order
  // does not dominate the residual
  long double full = 0.0L;
  for (double x : phi.components()) full += static_cast<long double>(x) * x;
  r.full = static_cast<double>(std::abs(full - 336.0L));
  return r;
}

/// Residuals of the identities satisfied by any covariant derivative of Phi.
struct NablaResiduals {
  double two_index = 0.0;  // (dPhi_ijkl) Phi_abkl + Phi_ijkl dPhi_abkl + 4 dPhi_ijab
  double one_index = 0.0;  // (dPhi_ijkl) Phi_ajkl + Phi_ijkl dPhi_ajkl
  double full = 0.0;       // (dPhi_ijkl) Phi_ijkl

  double max() const { return std::max({two_index, one_index, full}); }
};

/// `dphi[m]` is the derivative of Phi in direction m.
inline NablaResiduals nabla_contraction_residuals(std::span<const FourForm> dphi,
                                                  const FourForm& phi) {
  NablaResiduals r;
  for (const FourForm& d : dphi) {
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b) {
            double acc = 4.0 * d(i, j, a, b);
            for (int k = 0; k < kDim; ++k)
              for (int l = 0; l < kDim; ++l)
                acc += d(i, j, k, l) * phi(a, b, k, l) + phi(i, j, k, l) * d(a, b, k, l);
            r.two_index = std::max(r.two_index, std::abs(acc));
          }
    for (int i = 0; i < kDim; ++i)
      for (int a = 0; a < kDim; ++a) {
        double acc = 0.0;
        for (int j = 0; j < kDim; ++j)
          for (int k = 0; k < kDim; ++k)
            for (int l = 0; l < kDim; ++l)
              acc += d(i, j, k, l) * phi(a, j, k, l) + phi(i, j, k, l) * d(a, j, k, l);
        r.one_index = std::max(r.one_index, std::abs(acc));
      }
    r.full = std::max(r.full, std::abs(d.dot(phi)));
  }
  return r;
}

}  // namespace spin7
