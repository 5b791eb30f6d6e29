#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gldual/errors.hpp"

namespace gldual {

/// Uniform Cartesian mesh (1D or 2D) with homogeneous Dirichlet boundary.
/// Only interior nodes are stored; spacing is h[k] = extent[k] / (n[k] + 1).
struct Grid {
  int dim = 1;
  std::array<int, 2> n = {1, 1};          // interior nodes per axis (n[1] == 1 in 1D)
  std::array<double, 2> extent = {1, 1};  // physical lengths per axis
  std::array<double, 2> h = {0.5, 0.5};   // node spacing per axis
  double weight = 0.5;                    // quadrature weight per node, prod(h)

  int size() const { return dim == 1 ? n[0] : n[0] * n[1]; }

  int index(int i, int j = 0) const { return i + n[0] * j; }

  bool operator==(const Grid& other) const {
    return dim == other.dim && n == other.n && extent == other.extent;
  }
};

inline Grid make_grid_1d(int n, double extent = 1.0) {
  if (n < 1) throw std::invalid_argument("grid: need at least one interior node");
  if (extent <= 0) throw std::invalid_argument("grid: extent must be positive");
  Grid g;
  g.dim = 1;
  g.n = {n, 1};
  g.extent = {extent, 0.0};
  g.h = {extent / (n + 1), 0.0};
  g.weight = g.h[0];
  return g;
}

inline Grid make_grid_2d(int nx, int ny, double ex = 1.0, double ey = 1.0) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid: need at least one interior node per axis");
  if (ex <= 0 || ey <= 0) throw std::invalid_argument("grid: extents must be positive");
  Grid g;
  g.dim = 2;
  g.n = {nx, ny};
  g.extent = {ex, ey};
  g.h = {ex / (nx + 1), ey / (ny + 1)};
  g.weight = g.h[0] * g.h[1];
  return g;
}

/// One real value per interior node.
struct FieldReal {
  Grid grid;
  std::vector<double> v;

  FieldReal() = default;
  explicit FieldReal(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<size_t>(g.size()), fill) {}
  FieldReal(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {
    if (static_cast<int>(v.size()) != g.size())
      throw GridMismatchError("FieldReal: value count does not match grid size");
  }

  int size() const { return static_cast<int>(v.size()); }
  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw GridMismatchError(std::string(what) + ": fields live on different grids");
}

/// Discrete L2 inner product: weight * sum_i a_i b_i.
inline double inner(const Grid& grid, const FieldReal& a, const FieldReal& b) {
  require_same_grid(grid, a.grid, "inner");
  require_same_grid(grid, b.grid, "inner");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return grid.weight * s;
}

inline double norm2(const FieldReal& a) {
  double s = 0.0;
  for (double x : a.v) s += x * x;
  return std::sqrt(s);
}

inline FieldReal operator+(FieldReal a, const FieldReal& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  for (int i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline FieldReal operator-(FieldReal a, const FieldReal& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  for (int i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline FieldReal operator*(double c, FieldReal a) {
  for (double& x : a.v) x *= c;
  return a;
}

inline void axpy(double alpha, const FieldReal& x, FieldReal& y) {
  for (int i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace gldual
