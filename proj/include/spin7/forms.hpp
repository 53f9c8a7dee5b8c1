#pragma once

// Exterior-algebra bookkeeping on R^8: increasing index sets, packed
// storage of 4-forms, Hodge star, antisymmetry checks.

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "spin7/tensor.hpp"

namespace spin7 {

inline constexpr int kQuadCount = 70;
inline constexpr int kTripleCount = 56;
inline constexpr int kPairCount = 28;

using Quad = std::array<int, 4>;
using Triple = std::array<int, 3>;
using Pair = std::array<int, 2>;

/// The 70 independent components i<j<k<l of a 4-form.
using PackedFourForm = std::array<double, kQuadCount>;

namespace detail {

template <int N>
constexpr int permutation_sign(const std::array<int, N>& p) {
  int sign = 1;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

template <int N, int Count>
constexpr std::array<std::array<int, N>, Count> increasing_sets() {
  std::array<std::array<int, N>, Count> out{};
  std::array<int, N> cur{};
  for (int i = 0; i < N; ++i) cur[i] = i;
  for (int n = 0; n < Count; ++n) {
    out[n] = cur;
    int pos = N - 1;
    while (pos >= 0 && cur[pos] == kDim - N + pos) --pos;
    if (pos < 0) break;
    ++cur[pos];
    for (int q = pos + 1; q < N; ++q) cur[q] = cur[q - 1] + 1;
  }
  return out;
}

struct SignedPermutation {
  std::array<int, 4> order;
  int sign;
};

constexpr std::array<SignedPermutation, 24> permutations_of_four() {
  std::array<SignedPermutation, 24> out{};
  int n = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
          std::array<int, 4> p{a, b, c, d};
          out[n++] = {p, permutation_sign<4>(p)};
        }
  return out;
}

}  // namespace detail

inline constexpr auto kQuads = detail::increasing_sets<4, kQuadCount>();
inline constexpr auto kTriples = detail::increasing_sets<3, kTripleCount>();
inline constexpr auto kPairs = detail::increasing_sets<2, kPairCount>();
inline constexpr auto kPermutationsOfFour = detail::permutations_of_four();

/// Location of a dense 4-index component in packed storage.
struct PackedSlot {
  std::int8_t quad = -1;  // -1 when an index repeats
  std::int8_t sign = 0;
};

namespace detail {

constexpr std::array<PackedSlot, 4096> packed_lookup() {
  std::array<PackedSlot, 4096> table{};
  for (int q = 0; q < kQuadCount; ++q) {
    for (const auto& p : kPermutationsOfFour) {
      int flat = 0;
      for (int s = 0; s < 4; ++s) flat = flat * kDim + kQuads[q][p.order[s]];
      table[flat] = {static_cast<std::int8_t>(q), static_cast<std::int8_t>(p.sign)};
    }
  }
  return table;
}

}  // namespace detail

inline constexpr auto kPackedLookup = detail::packed_lookup();

constexpr PackedSlot packed_slot(int i, int j, int k, int l) {
  return kPackedLookup[((i * kDim + j) * kDim + k) * kDim + l];
}

inline PackedFourForm pack(const FourForm& sigma) {
  PackedFourForm out{};
  for (int q = 0; q < kQuadCount; ++q) {
    const auto& s = kQuads[q];
    out[q] = sigma(s[0], s[1], s[2], s[3]);
  }
  return out;
}

/// Dense antisymmetric 4-form from its 70 independent components.
inline FourForm unpack(const PackedFourForm& packed) {
  FourForm out;
  for (std::size_t flat = 0; flat < FourForm::size; ++flat) {
    const PackedSlot slot = kPackedLookup[flat];
    if (slot.quad >= 0) out[flat] = slot.sign * packed[slot.quad];
  }
  return out;
}

/// sigma = sum over quads of coefficient * dx^{quad}.
inline FourForm four_form_from_monomial(const Quad& indices, double coefficient) {
  FourForm out;
  for (const auto& p : kPermutationsOfFour)
    out(indices[p.order[0]], indices[p.order[1]], indices[p.order[2]], indices[p.order[3]]) +=
        coefficient * p.sign;
  return out;
}

/// Position of a violated antisymmetry: swapping slots `first` and `second`
/// of `index` does not flip the sign.
struct AntisymmetryViolation {
  double magnitude = 0.0;
  std::array<int, 4> index{};
  int first = 0;
  int second = 0;
};

/// Largest |x + x_swapped| over all index tuples and slot pairs. Repeated
/// indices count as violations of the form 2|x|.
template <int R, class T>
AntisymmetryViolation antisymmetry_violation(const Tensor<R, T>& t) {
  static_assert(R >= 2 && R <= 4);
  AntisymmetryViolation worst;
  std::array<int, 4> idx{};
  for (std::size_t flat = 0; flat < Tensor<R, T>::size; ++flat) {
    std::size_t rest = flat;
    for (int s = R - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rest % kDim);
      rest /= kDim;
    }
    for (int a = 0; a < R; ++a)
      for (int b = a + 1; b < R; ++b) {
        std::array<int, 4> sw = idx;
        std::swap(sw[a], sw[b]);
        std::size_t other = 0;
        for (int s = 0; s < R; ++s) other = other * kDim + sw[s];
        const double m = std::abs(t[flat] + t[other]);
        if (m > worst.magnitude) worst = {m, idx, a, b};
      }
  }
  return worst;
}

/// Orthogonal projection onto totally antisymmetric 4-tensors.
inline FourForm antisymmetrize(const FourForm& t) {
  PackedFourForm packed{};
  for (int q = 0; q < kQuadCount; ++q) {
    const auto& s = kQuads[q];
    double acc = 0.0;
    for (const auto& p : kPermutationsOfFour)
      acc += p.sign * t(s[p.order[0]], s[p.order[1]], s[p.order[2]], s[p.order[3]]);
    packed[q] = acc / 24.0;
  }
  return unpack(packed);
}

inline TwoForm antisymmetrize(const TwoForm& t) {
  TwoForm out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out(i, j) = 0.5 * (t(i, j) - t(j, i));
  return out;
}

namespace detail {

struct StarEntry {
  int complement;
  int sign;
};

constexpr std::array<StarEntry, kQuadCount> hodge_table() {
  std::array<StarEntry, kQuadCount> table{};
  for (int q = 0; q < kQuadCount; ++q) {
    std::array<int, 8> word{};
    bool used[kDim] = {};
    for (int s = 0; s < 4; ++s) {
      word[s] = kQuads[q][s];
      used[kQuads[q][s]] = true;
    }
    int n = 4;
    for (int i = 0; i < kDim; ++i)
      if (!used[i]) word[n++] = i;
    int comp = 0;
    for (int c = 0; c < kQuadCount; ++c)
      if (kQuads[c][0] == word[4] && kQuads[c][1] == word[5] && kQuads[c][2] == word[6] &&
          kQuads[c][3] == word[7])
        comp = c;
    table[q] = {comp, permutation_sign<8>(word)};
  }
  return table;
}

inline constexpr auto kHodgeTable = hodge_table();

}  // namespace detail

/// (*sigma)_ijkl = 1/24 eps_ijklabcd sigma_abcd with eps_01234567 = +1.
inline PackedFourForm hodge_star(const PackedFourForm& sigma) {
  PackedFourForm out{};
  for (int q = 0; q < kQuadCount; ++q) {
    const auto e = detail::kHodgeTable[q];
    out[q] = e.sign * sigma[e.complement];
  }
  return out;
}

inline FourForm hodge_star(const FourForm& sigma) { return unpack(hodge_star(pack(sigma))); }

}  // namespace spin7
