#pragma once

#include <vector>

#include "gldual/grid.hpp"

namespace gldual {

/// Second-difference Dirichlet Laplacian: (u_{i-1} - 2 u_i + u_{i+1}) / h^2
/// per axis, neighbours outside the interior dropped (zero boundary).
/// Symmetric and negative definite.
struct LaplacianOp {
  Grid grid;

  explicit LaplacianOp(const Grid& g) : grid(g) {}

  void apply_into(const FieldReal& u, FieldReal& out) const {
    require_same_grid(grid, u.grid, "LaplacianOp");
    const int nx = grid.n[0];
    const double ihx2 = 1.0 / (grid.h[0] * grid.h[0]);
    if (grid.dim == 1) {
      for (int i = 0; i < nx; ++i) {
        double s = -2.0 * u[i];
        if (i > 0) s += u[i - 1];
        if (i + 1 < nx) s += u[i + 1];
        out[i] = s * ihx2;
      }
      return;
    }
    const int ny = grid.n[1];
    const double ihy2 = 1.0 / (grid.h[1] * grid.h[1]);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int k = grid.index(i, j);
        double sx = -2.0 * u[k];
        if (i > 0) sx += u[k - 1];
        if (i + 1 < nx) sx += u[k + 1];
        double sy = -2.0 * u[k];
        if (j > 0) sy += u[k - nx];
        if (j + 1 < ny) sy += u[k + nx];
        out[k] = sx * ihx2 + sy * ihy2;
      }
    }
  }

  FieldReal apply(const FieldReal& u) const {
    FieldReal out(grid);
    apply_into(u, out);
    return out;
  }
};

inline LaplacianOp build_laplacian(const Grid& grid) { return LaplacianOp(grid); }

/// Operator of the form  c * L + diag(d)  with L the Dirichlet Laplacian.
/// Every symmetric operator this toolkit needs (K I + gamma L, Hessians,
/// -gamma L + 2 v0, plain diagonals) is an instance.
struct ShiftedLaplacian {
  Grid grid;
  double lap_coeff = 0.0;
  std::vector<double> diag;

  ShiftedLaplacian(const Grid& g, double c, std::vector<double> d)
      : grid(g), lap_coeff(c), diag(std::move(d)) {
    if (static_cast<int>(diag.size()) != g.size())
      throw GridMismatchError("ShiftedLaplacian: diagonal size mismatch");
  }
  ShiftedLaplacian(const Grid& g, double c, double const_diag)
      : grid(g), lap_coeff(c), diag(static_cast<size_t>(g.size()), const_diag) {}

  int size() const { return grid.size(); }

  void apply_into(const FieldReal& u, FieldReal& out) const {
    require_same_grid(grid, u.grid, "ShiftedLaplacian");
    if (lap_coeff != 0.0) {
      LaplacianOp(grid).apply_into(u, out);
      for (int i = 0; i < u.size(); ++i) out[i] = lap_coeff * out[i] + diag[static_cast<size_t>(i)] * u[i];
    } else {
      for (int i = 0; i < u.size(); ++i) out[i] = diag[static_cast<size_t>(i)] * u[i];
    }
  }

  FieldReal apply(const FieldReal& u) const {
    FieldReal out(grid);
    apply_into(u, out);
    return out;
  }
};

/// K I + gamma L.
inline ShiftedLaplacian shifted_identity_op(const Grid& g, double K, double gamma) {
  return ShiftedLaplacian(g, gamma, K);
}

/// -gamma L + 2 diag(v0).
inline ShiftedLaplacian curvature_op(const Grid& g, double gamma, const FieldReal& v0) {
  std::vector<double> d(v0.v);
  for (double& x : d) x *= 2.0;
  return ShiftedLaplacian(g, -gamma, std::move(d));
}

}  // namespace gldual
