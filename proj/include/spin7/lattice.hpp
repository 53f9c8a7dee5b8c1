#pragma once

// Periodic lattices over 1-3 active coordinates of the flat 8-torus.
// Tensors stay fully 8-dimensional; fields only vary along active axes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spin7 {

inline constexpr int kMaxActiveDims = 3;

class LatticeGrid {
 public:
  LatticeGrid() = default;

  /// Throws std::invalid_argument unless 1-3 distinct axes in 0..7, sizes are
  /// powers of two >= 8 and lengths are positive.
  LatticeGrid(std::vector<int> active_dims, std::vector<int> sizes, std::vector<double> lengths)
      : active_(std::move(active_dims)), sizes_(std::move(sizes)), lengths_(std::move(lengths)) {
    validate();
    sites_ = 1;
    for (int n : sizes_) sites_ *= static_cast<std::size_t>(n);
    for (int d = 0; d < dims(); ++d) axis_of_coordinate_[active_[d]] = d;
  }

  /// Square grid of side `size` over the given axes, torus side `length`.
  static LatticeGrid uniform(std::vector<int> active_dims, int size, double length = 1.0) {
    const std::size_t n = active_dims.size();
    return LatticeGrid(std::move(active_dims), std::vector<int>(n, size), std::vector<double>(n, length));
  }

  int dims() const { return static_cast<int>(active_.size()); }
  const std::vector<int>& active_dims() const { return active_; }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<double>& lengths() const { return lengths_; }
  std::size_t site_count() const { return sites_; }

  double spacing(int axis) const { return lengths_[axis] / sizes_[axis]; }
  double max_spacing() const {
    double h = 0.0;
    for (int d = 0; d < dims(); ++d) h = std::max(h, spacing(d));
    return h;
  }
  double min_spacing() const {
    double h = spacing(0);
    for (int d = 1; d < dims(); ++d) h = std::min(h, spacing(d));
    return h;
  }
  /// Product of spacings over the active axes.
  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dims(); ++d) v *= spacing(d);
    return v;
  }
  /// Volume of the active torus.
  double volume() const {
    double v = 1.0;
    for (double l : lengths_) v *= l;
    return v;
  }

  /// Lattice axis (0..dims()-1) for a coordinate direction, -1 if inactive.
  int axis_of(int coordinate) const { return axis_of_coordinate_[coordinate]; }

  using Coords = std::array<int, kMaxActiveDims>;

  /// Row-major: the first active axis varies slowest.
  Coords coords(std::size_t site) const {
    Coords c{};
    for (int d = dims() - 1; d >= 0; --d) {
      c[d] = static_cast<int>(site % sizes_[d]);
      site /= sizes_[d];
    }
    return c;
  }

  std::size_t site(const Coords& c) const {
    std::size_t s = 0;
    for (int d = 0; d < dims(); ++d) s = s * sizes_[d] + c[d];
    return s;
  }

  /// Site displaced by `offset` points along lattice axis `axis`, periodic.
  std::size_t shifted(std::size_t site_index, int axis, int offset) const {
    Coords c = coords(site_index);
    const int n = sizes_[axis];
    c[axis] = ((c[axis] + offset) % n + n) % n;
    return site(c);
  }

  /// Stride in site index of one step along `axis`.
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int d = dims() - 1; d > axis; --d) s *= sizes_[d];
    return s;
  }

  double position(std::size_t site_index, int axis) const { return coords(site_index)[axis] * spacing(axis); }

  bool operator==(const LatticeGrid& o) const {
    return active_ == o.active_ && sizes_ == o.sizes_ && lengths_ == o.lengths_;
  }

 private:
  void validate() const {
    const std::size_t n = active_.size();
    if (n < 1 || n > kMaxActiveDims)
      throw std::invalid_argument("lattice: need 1 to 3 active dimensions, got " + std::to_string(n));
    if (sizes_.size() != n || lengths_.size() != n)
      throw std::invalid_argument("lattice: sizes and lengths must match the active dimensions");
    for (std::size_t d = 0; d < n; ++d) {
      if (active_[d] < 0 || active_[d] > 7)
        throw std::invalid_argument("lattice: active dimension out of range 0..7");
      for (std::size_t e = 0; e < d; ++e)
        if (active_[e] == active_[d]) throw std::invalid_argument("lattice: repeated active dimension");
      const int s = sizes_[d];
      if (s < 8 || (s & (s - 1)) != 0)
        throw std::invalid_argument("lattice: sizes must be powers of two >= 8, got " + std::to_string(s));
      if (!(lengths_[d] > 0.0) || !std::isfinite(lengths_[d]))
        throw std::invalid_argument("lattice: torus lengths must be positive");
    }
  }

  std::vector<int> active_;
  std::vector<int> sizes_;
  std::vector<double> lengths_;
  std::size_t sites_ = 0;
  std::array<int, 8> axis_of_coordinate_{-1, -1, -1, -1, -1, -1, -1, -1};
};

/// Centered periodic first-derivative stencils of order 2 and 4.
struct Stencil {
  int order = 2;
  std::array<double, 2> weights{};  // coefficients of f(x+k h) - f(x-k h), k = 1, 2
  int radius = 1;

  static Stencil of_order(int order) {
    if (order == 2) return {2, {0.5, 0.0}, 1};
    if (order == 4) return {4, {2.0 / 3.0, -1.0 / 12.0}, 2};
    throw std::invalid_argument("stencil order must be 2 or 4");
  }

  void check(const LatticeGrid& grid) const {
    for (int n : grid.sizes())
      if (n < 2 * radius + 1) throw std::invalid_argument("grid too small for stencil");
  }

  /// Largest eigenvalue magnitude of the composed (first-derivative squared)
  /// operator per axis, in units of 1/h^2.
  double composite_spectral_radius() const {
    if (order == 2) return 1.0;
    // max over theta of (4/3 sin t - 1/6 sin 2t)^2, attained at cos t = (2 - sqrt 6) / 2
    const double c = (2.0 - std::sqrt(6.0)) / 2.0;
    const double s = std::sqrt(1.0 - c * c);
    const double f = 4.0 / 3.0 * s - 1.0 / 3.0 * s * c;
    return f * f;
  }
};

}  // namespace spin7
