#pragma once

// Structure fields on a periodic lattice and the field-level torsion pipeline.
//
// Per site we keep the generating rotation Q(x) and the 70 independent
// components of Phi(x) = Q(x).Phi_0. Derivatives, torsion and divergence work
// on packed storage through small index tables; dense accessors are provided
// for the pointwise algebra (and for tests that cross-check the two).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spin7/cayley.hpp"
#include "spin7/fiber.hpp"
#include "spin7/forms.hpp"
#include "spin7/lattice.hpp"
#include "spin7/torsion.hpp"

namespace spin7 {

/// Upper-triangular components beta_ab, a < b, in kPairs order.
using PackedTwoForm = std::array<double, kPairCount>;

inline PackedTwoForm pack(const TwoForm& beta) {
  PackedTwoForm p{};
  for (int n = 0; n < kPairCount; ++n) p[n] = beta(kPairs[n][0], kPairs[n][1]);
  return p;
}

inline TwoForm unpack(const PackedTwoForm& p) {
  TwoForm beta;
  for (int n = 0; n < kPairCount; ++n) {
    beta(kPairs[n][0], kPairs[n][1]) = p[n];
    beta(kPairs[n][1], kPairs[n][0]) = -p[n];
  }
  return beta;
}

inline Matrix8 to_matrix(const PackedTwoForm& p) {
  Matrix8 m = Matrix8::Zero();
  for (int n = 0; n < kPairCount; ++n) {
    m(kPairs[n][0], kPairs[n][1]) = p[n];
    m(kPairs[n][1], kPairs[n][0]) = -p[n];
  }
  return m;
}

/// Full-contraction norm sum_{a,b} beta_ab^2 of a packed two-form.
inline double norm_squared(const PackedTwoForm& p) {
  double acc = 0.0;
  for (double x : p) acc += x * x;
  return 2.0 * acc;
}

namespace detail {

struct TorsionEntry {
  std::int8_t with_a, with_b;  // packed slots of {a} u t and {b} u t
  std::int8_t sign;            // sign(a t) * sign(b t)
};

// For each pair a < b, the 20 triples t disjoint from {a, b}.
constexpr std::array<std::array<TorsionEntry, 20>, kPairCount> torsion_table() {
  std::array<std::array<TorsionEntry, 20>, kPairCount> table{};
  for (int n = 0; n < kPairCount; ++n) {
    const int a = kPairs[n][0], b = kPairs[n][1];
    int k = 0;
    for (const auto& t : kTriples) {
      if (t[0] == a || t[1] == a || t[2] == a || t[0] == b || t[1] == b || t[2] == b) continue;
      const PackedSlot sa = packed_slot(a, t[0], t[1], t[2]);
      const PackedSlot sb = packed_slot(b, t[0], t[1], t[2]);
      table[n][k++] = {sa.quad, sb.quad, static_cast<std::int8_t>(sa.sign * sb.sign)};
    }
  }
  return table;
}

struct PairEntry {
  std::int8_t pair, quad, sign;
};

// For each pair (i, j), the 15 pairs (a, b) disjoint from it with Phi_abij's slot.
constexpr std::array<std::array<PairEntry, 15>, kPairCount> projection_table() {
  std::array<std::array<PairEntry, 15>, kPairCount> table{};
  for (int n = 0; n < kPairCount; ++n) {
    const int i = kPairs[n][0], j = kPairs[n][1];
    int k = 0;
    for (int m = 0; m < kPairCount; ++m) {
      const int a = kPairs[m][0], b = kPairs[m][1];
      if (a == i || a == j || b == i || b == j) continue;
      const PackedSlot s = packed_slot(a, b, i, j);
      table[n][k++] = {static_cast<std::int8_t>(m), s.quad, s.sign};
    }
  }
  return table;
}

}  // namespace detail

inline constexpr auto kTorsionTable = detail::torsion_table();
inline constexpr auto kProjectionTable = detail::projection_table();

/// T_ab = 1/96 (dPhi_ajkl Phi_bjkl - dPhi_bjkl Phi_ajkl) / 2 on packed forms.
inline PackedTwoForm packed_torsion(const PackedFourForm& dphi, const PackedFourForm& phi) {
  PackedTwoForm t{};
  for (int n = 0; n < kPairCount; ++n) {
    double acc = 0.0;
    for (const auto& e : kTorsionTable[n])
      acc += e.sign * (dphi[e.with_a] * phi[e.with_b] - dphi[e.with_b] * phi[e.with_a]);
    t[n] = acc / 32.0;
  }
  return t;
}

/// pi_7(V)_ij = V_ij / 4 - V_ab Phi_abij / 8 on packed forms.
inline PackedTwoForm packed_project_seven(const PackedTwoForm& v, const PackedFourForm& phi) {
  PackedTwoForm out{};
  for (int n = 0; n < kPairCount; ++n) {
    double acc = 0.0;
    for (const auto& e : kProjectionTable[n]) acc += e.sign * v[e.pair] * phi[e.quad];
    out[n] = 0.25 * v[n] - 0.25 * acc;
  }
  return out;
}

/// Max residual of the identities Phi_ijkl Phi_abkl = 6(g g - g g) - 4 Phi_ijab,
/// Phi_ijkl Phi_ajkl = 42 g_ia and |Phi|^2 = 336, evaluated on packed storage.
inline double packed_identity_residual(const PackedFourForm& phi) {
  // pairs[p][r] = Phi_{ij kl} for pairs p = (i<j), r = (k<l); then the two-index
  // contraction over all (k, l) is 2 pairs pairs^T.
  Eigen::Matrix<double, kPairCount, kPairCount> pairs;
  for (int p = 0; p < kPairCount; ++p)
    for (int r = 0; r < kPairCount; ++r) {
      const PackedSlot s = packed_slot(kPairs[p][0], kPairs[p][1], kPairs[r][0], kPairs[r][1]);
      pairs(p, r) = s.quad < 0 ? 0.0 : s.sign * phi[s.quad];
    }
  const Eigen::Matrix<double, kPairCount, kPairCount> two = 2.0 * pairs * pairs.transpose();
  double worst = ((two + 4.0 * pairs) - 6.0 * Eigen::Matrix<double, kPairCount, kPairCount>::Identity())
                     .cwiseAbs()
                     .maxCoeff();
  // singles[i][t] = Phi_{i t} over increasing triples t; contraction = 6 singles singles^T
  Eigen::Matrix<double, kDim, kTripleCount> singles;
  for (int i = 0; i < kDim; ++i)
    for (int t = 0; t < kTripleCount; ++t) {
      const PackedSlot s = packed_slot(i, kTriples[t][0], kTriples[t][1], kTriples[t][2]);
      singles(i, t) = s.quad < 0 ? 0.0 : s.sign * phi[s.quad];
    }
  const Matrix8 one = 6.0 * singles * singles.transpose();
  worst = std::max(worst, (one - 42.0 * Matrix8::Identity()).cwiseAbs().maxCoeff());
  double full = 0.0;
  for (double x : phi) full += x * x;
  return std::max(worst, std::abs(24.0 * full - 336.0));
}

// ---------------------------------------------------------------- fields

struct StructureField {
  LatticeGrid grid;
  std::vector<Matrix8> rotation;
  std::vector<PackedFourForm> phi;

  StructureField() = default;
  explicit StructureField(LatticeGrid g)
      : grid(std::move(g)), rotation(grid.site_count(), Matrix8::Identity()),
        phi(grid.site_count(), standard_phi_packed()) {}

  static StructureField from_fiber(const FiberField& f, const Omega27Basis& basis = standard_basis()) {
    StructureField s(f.grid);
    for (std::size_t x = 0; x < s.size(); ++x) {
      s.rotation[x] = rotation_from_fiber(f.values[x], basis);
      s.phi[x] = act_on_standard(s.rotation[x]);
    }
    return s;
  }

  std::size_t size() const { return phi.size(); }

  /// Recomputes Phi from Q at every site.
  void refresh() {
    for (std::size_t x = 0; x < size(); ++x) phi[x] = act_on_standard(rotation[x]);
  }

  /// Fiber coordinates by Newton inversion of the chart, seeded by `hint`
  /// when it lives on the same grid.
  FiberField to_fiber(const Omega27Basis& basis = standard_basis(), const FiberField* hint = nullptr) const {
    FiberField f(grid);
    for (std::size_t x = 0; x < size(); ++x)
      f.values[x] = fiber_from_structure(phi[x], basis, hint ? hint->values[x] : Fiber{});
    return f;
  }
};

struct AdmissibilityReport {
  double identity = 0.0;       // worst packed identity residual over sites
  double orthogonality = 0.0;  // worst |Q^T Q - I|
  double consistency = 0.0;    // worst |Phi - Q.Phi_0|

  double max() const { return std::max({identity, orthogonality, consistency}); }
};

inline AdmissibilityReport admissibility(const StructureField& f) {
  AdmissibilityReport r;
  for (std::size_t x = 0; x < f.size(); ++x) {
    r.identity = std::max(r.identity, packed_identity_residual(f.phi[x]));
    const Matrix8& q = f.rotation[x];
    r.orthogonality =
        std::max(r.orthogonality, (q.transpose() * q - Matrix8::Identity()).cwiseAbs().maxCoeff());
    const PackedFourForm ref = act_on_standard(q);
    for (int c = 0; c < kQuadCount; ++c) r.consistency = std::max(r.consistency, std::abs(ref[c] - f.phi[x][c]));
  }
  return r;
}

/// Applies the centered stencil along lattice axis `axis` to a per-site array.
template <class Packed>
void differentiate(const LatticeGrid& grid, const Stencil& stencil, int axis, const std::vector<Packed>& in,
                   std::vector<Packed>& out) {
  const std::size_t sites = grid.site_count();
  const std::size_t stride = grid.stride(axis);
  const std::size_t n = static_cast<std::size_t>(grid.sizes()[axis]);
  const std::size_t period = stride * n;
  const double inv_h = 1.0 / grid.spacing(axis);
  out.resize(sites);
  for (std::size_t s = 0; s < sites; ++s) {
    const std::size_t base = s - (s % period);
    const std::size_t pos = (s % period) / stride;
    const std::size_t lane = s % stride;
    Packed acc{};
    for (int k = 1; k <= stencil.radius; ++k) {
      const double w = stencil.weights[k - 1] * inv_h;
      const std::size_t fwd = base + ((pos + k) % n) * stride + lane;
      const std::size_t bwd = base + ((pos + n - k) % n) * stride + lane;
      const Packed& f = in[fwd];
      const Packed& b = in[bwd];
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += w * (f[c] - b[c]);
    }
    out[s] = acc;
  }
}

/// Second-difference Laplacian of matching order on a scalar field.
inline std::vector<double> lattice_laplacian(const LatticeGrid& grid, const Stencil& stencil,
                                             const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  for (int d = 0; d < grid.dims(); ++d) {
    const double ih2 = 1.0 / (grid.spacing(d) * grid.spacing(d));
    for (std::size_t s = 0; s < f.size(); ++s) {
      double v;
      if (stencil.order == 2) {
        v = f[grid.shifted(s, d, 1)] - 2.0 * f[s] + f[grid.shifted(s, d, -1)];
      } else {
        v = (-f[grid.shifted(s, d, 2)] + 16.0 * f[grid.shifted(s, d, 1)] - 30.0 * f[s] +
             16.0 * f[grid.shifted(s, d, -1)] - f[grid.shifted(s, d, -2)]) /
            12.0;
      }
      out[s] += v * ih2;
    }
  }
  return out;
}

/// d_m Phi per active axis, packed; slices for inactive directions are zero.
struct SpatialGradient {
  LatticeGrid grid;
  std::vector<std::vector<PackedFourForm>> axis;  // [lattice axis][site]

  /// Dense nabla_m Phi, m = 0..7, at one site.
  FormGradient at(std::size_t site) const {
    FormGradient g(kDim);
    for (int d = 0; d < grid.dims(); ++d) g[grid.active_dims()[d]] = unpack(axis[d][site]);
    return g;
  }
};

inline SpatialGradient spatial_gradient(const StructureField& f, const Stencil& stencil) {
  stencil.check(f.grid);
  SpatialGradient g{f.grid, std::vector<std::vector<PackedFourForm>>(f.grid.dims())};
  for (int d = 0; d < f.grid.dims(); ++d) differentiate(f.grid, stencil, d, f.phi, g.axis[d]);
  return g;
}

/// T_m per active axis, packed.
struct TorsionField {
  LatticeGrid grid;
  std::vector<std::vector<PackedTwoForm>> axis;  // [lattice axis][site]

  TorsionTensor at(std::size_t site) const {
    TorsionTensor t;
    for (int d = 0; d < grid.dims(); ++d) t.slice[grid.active_dims()[d]] = unpack(axis[d][site]);
    return t;
  }

  /// |T(x)|^2 with the full-contraction convention.
  double norm_squared(std::size_t site) const {
    double acc = 0.0;
    for (const auto& a : axis) acc += spin7::norm_squared(a[site]);
    return acc;
  }

  std::vector<double> density() const {
    std::vector<double> e(grid.site_count());
    for (std::size_t s = 0; s < e.size(); ++s) e[s] = norm_squared(s);
    return e;
  }
};

inline TorsionField torsion_field(const StructureField& f, const SpatialGradient& g) {
  TorsionField t{f.grid, std::vector<std::vector<PackedTwoForm>>(f.grid.dims())};
  for (int d = 0; d < f.grid.dims(); ++d) {
    t.axis[d].resize(f.size());
    for (std::size_t s = 0; s < f.size(); ++s) t.axis[d][s] = packed_torsion(g.axis[d][s], f.phi[s]);
  }
  return t;
}

inline TorsionField torsion_field(const StructureField& f, const Stencil& stencil) {
  return torsion_field(f, spatial_gradient(f, stencil));
}

/// nabla_i T_m for active i and m: [i][m][site].
struct TorsionFieldGradient {
  LatticeGrid grid;
  std::vector<std::vector<std::vector<PackedTwoForm>>> d;

  TorsionGradient at(std::size_t site) const {
    TorsionGradient g;
    const auto& act = grid.active_dims();
    for (int i = 0; i < grid.dims(); ++i)
      for (int m = 0; m < grid.dims(); ++m) g.d[act[i]].slice[act[m]] = unpack(d[i][m][site]);
    return g;
  }

  /// |nabla T|^2 = sum_{i,m,a,b} (nabla_i T_{m;ab})^2.
  double norm_squared(std::size_t site) const {
    double acc = 0.0;
    for (const auto& di : d)
      for (const auto& dm : di) acc += spin7::norm_squared(dm[site]);
    return acc;
  }
};

inline TorsionFieldGradient torsion_gradient(const TorsionField& t, const Stencil& stencil) {
  const int n = t.grid.dims();
  TorsionFieldGradient g{t.grid, std::vector<std::vector<std::vector<PackedTwoForm>>>(
                                     n, std::vector<std::vector<PackedTwoForm>>(n))};
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) differentiate(t.grid, stencil, i, t.axis[m], g.d[i][m]);
  return g;
}

struct DivergenceField {
  std::vector<PackedTwoForm> value;  // pi_7 of sum_m d_m T_m
  double projection_residual = 0.0;  // worst |V - pi_7 V| (full contraction norm)
};

inline DivergenceField div_torsion_field(const StructureField& f, const TorsionField& t, const Stencil& stencil) {
  DivergenceField out;
  out.value.assign(f.size(), PackedTwoForm{});
  std::vector<PackedTwoForm> dm;
  for (int m = 0; m < f.grid.dims(); ++m) {
    differentiate(f.grid, stencil, m, t.axis[m], dm);
    for (std::size_t s = 0; s < f.size(); ++s)
      for (int c = 0; c < kPairCount; ++c) out.value[s][c] += dm[s][c];
  }
  for (std::size_t s = 0; s < f.size(); ++s) {
    const PackedTwoForm p = packed_project_seven(out.value[s], f.phi[s]);
    PackedTwoForm diff;
    for (int c = 0; c < kPairCount; ++c) diff[c] = out.value[s][c] - p[c];
    out.projection_residual = std::max(out.projection_residual, std::sqrt(norm_squared(diff)));
    out.value[s] = p;
  }
  return out;
}

inline DivergenceField div_torsion_field(const StructureField& f, const Stencil& stencil) {
  return div_torsion_field(f, torsion_field(f, stencil), stencil);
}

}  // namespace spin7
