// Test-side oracles, kept independent of the library's solver paths:
// dense eigendecomposition, finite differences of functionals, and a
// brute-force maximizer for concave quadratic objectives assembled purely
// from objective evaluations.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "gldual/grid.hpp"
#include "gldual/linsolve.hpp"

namespace oracles {

using gldual::FieldReal;
using gldual::Grid;

/// Dense spectrum via Eigen (brute force; N small).
template <class Op>
Eigen::VectorXd dense_spectrum(const Op& op) {
  const Eigen::MatrixXd m = gldual::to_dense(op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues();
}

/// Closed-form extremal eigenvalues of -L on a Dirichlet tensor grid:
/// sum over axes of 2 (1 - cos(k pi/(n+1))) / h^2, k = 1 and k = n.
inline std::pair<double, double> neg_laplacian_extremes_closed_form(const Grid& g) {
  double lo = 0.0, hi = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double na = g.n[a];
    const double ih2 = 1.0 / (g.h[a] * g.h[a]);
    lo += 2.0 * (1.0 - std::cos(std::numbers::pi / (na + 1))) * ih2;
    hi += 2.0 * (1.0 - std::cos(na * std::numbers::pi / (na + 1))) * ih2;
  }
  return {lo, hi};
}

/// Central-difference gradient of a scalar functional of a field.
inline std::vector<double> fd_gradient(const std::function<double(const FieldReal&)>& F,
                                       const FieldReal& x0, double eps) {
  std::vector<double> g(static_cast<size_t>(x0.size()));
  for (int i = 0; i < x0.size(); ++i) {
    FieldReal xp = x0, xm = x0;
    xp[i] += eps;
    xm[i] -= eps;
    g[static_cast<size_t>(i)] = (F(xp) - F(xm)) / (2.0 * eps);
  }
  return g;
}

/// Maximizer for a concave quadratic objective on R^n given only an
/// evaluator: gradient and Hessian are assembled by central differences
/// (exact for quadratics up to rounding) and the stationary system is solved
/// densely.  Returns the objective value at the stationary point.
inline double quadratic_sup(const std::function<double(const std::vector<double>&)>& F, int n,
                            double probe = 0.5) {
  std::vector<double> zero(static_cast<size_t>(n), 0.0);
  Eigen::VectorXd g(n);
  Eigen::MatrixXd H(n, n);
  const double f0 = F(zero);
  auto at = [&](int i, double si, int j, double sj) {
    std::vector<double> x = zero;
    x[static_cast<size_t>(i)] += si * probe;
    if (j >= 0) x[static_cast<size_t>(j)] += sj * probe;
    return F(x);
  };
  for (int i = 0; i < n; ++i) {
    const double fp = at(i, +1, -1, 0), fm = at(i, -1, -1, 0);
    g(i) = (fp - fm) / (2.0 * probe);
    H(i, i) = (fp - 2.0 * f0 + fm) / (probe * probe);
    for (int j = 0; j < i; ++j) {
      H(i, j) = (at(i, +1, j, +1) - at(i, +1, j, -1) - at(i, -1, j, +1) + at(i, -1, j, -1)) /
                (4.0 * probe * probe);
      H(j, i) = H(i, j);
    }
  }
  // stationary point of the quadratic model; least squares tolerates the
  // flat directions some conjugate objectives have
  const Eigen::VectorXd x = H.completeOrthogonalDecomposition().solve(-g);
  std::vector<double> xv(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) xv[static_cast<size_t>(i)] = x(i);
  return F(xv);
}

/// Every grid with at most `max_nodes` nodes, 1D and 2D.
inline std::vector<Grid> small_grids(int max_nodes) {
  std::vector<Grid> out;
  for (int n = 1; n <= max_nodes; ++n) out.push_back(gldual::make_grid_1d(n, 1.0));
  for (int nx = 1; nx <= max_nodes; ++nx)
    for (int ny = 1; ny <= max_nodes; ++ny)
      if (nx * ny <= max_nodes) out.push_back(gldual::make_grid_2d(nx, ny, 1.0, 1.3));
  return out;
}

inline FieldReal random_field(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  FieldReal u(g);
  for (int i = 0; i < u.size(); ++i) u[i] = scale * unif(rng);
  return u;
}

}  // namespace oracles
