#pragma once

// Dense tensors on R^8 with indices lowered by the flat metric.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>

namespace spin7 {

inline constexpr int kDim = 8;

namespace detail {

constexpr std::size_t ipow(std::size_t base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

}  // namespace detail

/// Dense rank-`Rank` array of reals indexed 0..7 in every slot, row-major.
///
/// `Tag` distinguishes tensors of equal rank but different meaning
/// (a two-form and an endomorphism are both 8x8 arrays).
template <int Rank, class Tag>
class Tensor {
 public:
  static constexpr int rank = Rank;
  static constexpr std::size_t size = detail::ipow(kDim, Rank);

  Tensor() { data_.fill(0.0); }

  template <class... I>
    requires(sizeof...(I) == Rank && (std::is_integral_v<I> && ...))
  double& operator()(I... idx) {
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }

  template <class... I>
    requires(sizeof...(I) == Rank && (std::is_integral_v<I> && ...))
  double operator()(I... idx) const {
    return data_[offset(static_cast<std::size_t>(idx)...)];
  }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  std::span<double, size> components() { return data_; }
  std::span<const double, size> components() const { return data_; }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t i = 0; i < size; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t i = 0; i < size; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }
  friend Tensor operator-(Tensor a) { return a *= -1.0; }

  /// Full contraction over all index slots (no combinatorial factor).
  double dot(const Tensor& o) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size; ++i) acc += data_[i] * o.data_[i];
    return acc;
  }
  double norm_squared() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_squared()); }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool operator==(const Tensor&) const = default;

 private:
  template <class... I>
  static constexpr std::size_t offset(I... idx) {
    std::size_t off = 0;
    ((off = off * kDim + idx), ...);
    return off;
  }

  std::array<double, size> data_;
};

struct TwoFormTag {};
struct ThreeFormTag {};
struct FourFormTag {};
struct EndomorphismTag {};

/// beta = 1/2 beta_ij dx^i ^ dx^j, stored as the full antisymmetric array.
using TwoForm = Tensor<2, TwoFormTag>;
using ThreeForm = Tensor<3, ThreeFormTag>;
/// Phi = 1/24 Phi_ijkl dx^ijkl, stored as the full antisymmetric array.
using FourForm = Tensor<4, FourFormTag>;
/// A_ip, a general element of End(TR^8) = Omega^0 + S_0 + Omega^2.
using Endomorphism = Tensor<2, EndomorphismTag>;

using Vector8 = std::array<double, kDim>;

inline Endomorphism as_endomorphism(const TwoForm& beta) {
  Endomorphism a;
  for (std::size_t i = 0; i < TwoForm::size; ++i) a[i] = beta[i];
  return a;
}

inline Endomorphism identity_endomorphism() {
  Endomorphism a;
  for (int i = 0; i < kDim; ++i) a(i, i) = 1.0;
  return a;
}

template <int R, class T>
double max_abs_difference(const Tensor<R, T>& a, const Tensor<R, T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < Tensor<R, T>::size; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace spin7
