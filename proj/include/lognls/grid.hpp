#pragma once

// Uniform periodic grids on centered boxes [-L/2, L/2)^d and complex fields on them.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lognls/error.hpp"

namespace lognls {

using cdouble = std::complex<double>;

struct Grid {
  int dim = 1;
  double extent = 40.0;  // L
  int n = 512;           // points per axis

  Grid() = default;
  Grid(int dim_, double extent_, int n_) : dim(dim_), extent(extent_), n(n_) { validate(); }

  void validate() const {
    require(dim >= 1 && dim <= 3, ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3");
    require(extent > 0.0 && std::isfinite(extent), ErrorKind::InvalidArgument,
            "grid extent must be positive");
    require(n >= 16 && (n & (n - 1)) == 0, ErrorKind::InvalidArgument,
            "points per axis must be a power of two >= 16");
  }

  double spacing() const { return extent / n; }
  double cell_volume() const { return std::pow(spacing(), dim); }
  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n);
    return s;
  }
  double node(int k) const { return -0.5 * extent + k * spacing(); }
  /// Angular wavenumber of FFT index k (Nyquist mapped to -n/2).
  double wavenumber(int k) const {
    const int m = k < n / 2 ? k : k - n;
    return 2.0 * std::numbers::pi / extent * m;
  }
  bool is_nyquist(int k) const { return k == n / 2; }

  /// Per-axis indices of flat index `idx` (axis 0 slowest).
  std::array<int, 3> unravel(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      ijk[a] = static_cast<int>(idx % static_cast<std::size_t>(n));
      idx /= static_cast<std::size_t>(n);
    }
    return ijk;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim == b.dim && a.extent == b.extent && a.n == b.n;
  }
};

/// Calls f(flat_index, x) for every node, x a span of length dim.
template <class F>
void for_each_node(const Grid& g, F&& f) {
  const std::size_t total = g.size();
  std::array<double, 3> x{};
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto ijk = g.unravel(idx);
    for (int a = 0; a < g.dim; ++a) x[a] = g.node(ijk[a]);
    f(idx, std::span<const double>(x.data(), static_cast<std::size_t>(g.dim)));
  }
}

struct Field {
  Grid grid;
  std::vector<cdouble> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(g.size(), cdouble(0.0, 0.0)) {}
  Field(const Grid& g, std::vector<cdouble> v) : grid(g), values(std::move(v)) {
    require(values.size() == g.size(), ErrorKind::InvalidArgument, "field length != n^d");
  }

  std::size_t size() const { return values.size(); }
  cdouble& operator[](std::size_t i) { return values[i]; }
  const cdouble& operator[](std::size_t i) const { return values[i]; }

  bool all_finite() const {
    for (const auto& z : values)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  Field& operator+=(const Field& o) {
    require(grid == o.grid, ErrorKind::GridMismatch, "fields live on different grids");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require(grid == o.grid, ErrorKind::GridMismatch, "fields live on different grids");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  Field& operator*=(cdouble s) {
    for (auto& z : values) z *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, cdouble s) { return a *= s; }
  friend Field operator*(cdouble s, Field a) { return a *= s; }
};

/// Evaluate fn at the grid nodes x_k = -L/2 + k h.
template <class Fn>
Field sample(Fn&& fn, const Grid& grid) {
  grid.validate();
  Field f(grid);
  for_each_node(grid, [&](std::size_t idx, std::span<const double> x) {
    const cdouble z = fn(x);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      fail(ErrorKind::NonFiniteSample, "sampled function is not finite at node " +
                                           std::to_string(idx));
    f.values[idx] = z;
  });
  return f;
}

/// Pointwise complex conjugate.
inline Field conj(Field f) {
  for (auto& z : f.values) z = std::conj(z);
  return f;
}

}  // namespace lognls
