#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "gldual/errors.hpp"
#include "gldual/grid.hpp"
#include "gldual/laplacian.hpp"

namespace gldual {

struct SolveOptions {
  double rtol = 1e-10;
  int max_iters = 0;        // 0 -> 10 * N (floor 50)
  bool prefer_dense = false;  // direct LDLT for N <= 256 (smooth in the data;
                              // used when solves sit inside finite differences)
};

namespace detail {

template <class Op>
Eigen::MatrixXd assemble_dense(const Op& op) {
  const int n = op.grid.size();
  Eigen::MatrixXd m(n, n);
  FieldReal e(op.grid, 0.0), col(op.grid);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply_into(e, col);
    for (int i = 0; i < n; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

template <class Op>
FieldReal dense_spd_solve(const Op& op, const FieldReal& rhs) {
  Eigen::MatrixXd m = assemble_dense(op);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw IndefiniteOperatorError("spd_solve(dense): operator is not positive definite");
  Eigen::VectorXd b(rhs.size());
  for (int i = 0; i < rhs.size(); ++i) b(i) = rhs[i];
  const Eigen::VectorXd x = ldlt.solve(b);
  FieldReal out(rhs.grid);
  for (int i = 0; i < rhs.size(); ++i) out[i] = x(i);
  return out;
}

}  // namespace detail

/// Conjugate gradients for a symmetric positive definite operator.
/// Throws IndefiniteOperatorError when a direction of nonpositive curvature
/// shows up (the SPD precondition is violated), SolverError when the
/// iteration cap is reached with the residual still above rtol * |rhs|.
template <class Op>
FieldReal spd_solve(const Op& op, const FieldReal& rhs, SolveOptions opts = {}) {
  require_same_grid(op.grid, rhs.grid, "spd_solve");
  const int n = rhs.size();
  if (opts.prefer_dense && n <= 256) return detail::dense_spd_solve(op, rhs);
  const int cap = opts.max_iters > 0 ? opts.max_iters : std::max(50, 10 * n);
  const double rhs_norm = norm2(rhs);

  FieldReal x(rhs.grid, 0.0);
  if (rhs_norm == 0.0) return x;
  const double target = opts.rtol * rhs_norm;

  FieldReal r = rhs;  // residual of x = 0
  FieldReal p = r;
  FieldReal ap(rhs.grid);
  double rr = 0.0;
  for (int i = 0; i < n; ++i) rr += r[i] * r[i];

  for (int it = 0; it < cap; ++it) {
    op.apply_into(p, ap);
    double pap = 0.0;
    for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0)) {
      throw IndefiniteOperatorError(
          "spd_solve: operator is not positive definite "
          "(nonpositive curvature p'Ap = " + std::to_string(pap) + " at iteration " +
          std::to_string(it) + ")");
    }
    const double alpha = rr / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    double rr_new = 0.0;
    for (int i = 0; i < n; ++i) rr_new += r[i] * r[i];
    if (std::sqrt(rr_new) <= target) {
      // recurrence residual can drift; confirm against the true residual
      op.apply_into(x, ap);
      double true_rr = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = ap[i] - rhs[i];
        true_rr += d * d;
      }
      if (std::sqrt(true_rr) <= target) return x;
      for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
      rr_new = true_rr;
      p = r;
      rr = rr_new;
      continue;
    }
    const double beta = rr_new / rr;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  throw SolverError("spd_solve: no convergence within " + std::to_string(cap) +
                        " iterations (residual " + std::to_string(std::sqrt(rr)) + ")",
                    std::sqrt(rr));
}

template <class Op>
FieldReal spd_solve(const Op& op, const FieldReal& rhs, double rtol) {
  return spd_solve(op, rhs, SolveOptions{rtol, 0});
}

/// Assemble the dense matrix of a linear operator by probing basis vectors.
template <class Op>
Eigen::MatrixXd to_dense(const Op& op) {
  return detail::assemble_dense(op);
}

/// Direct dense solve; the deterministic fallback/oracle path for small N.
template <class Op>
FieldReal dense_solve(const Op& op, const FieldReal& rhs) {
  Eigen::MatrixXd m = to_dense(op);
  Eigen::VectorXd b(rhs.size());
  for (int i = 0; i < rhs.size(); ++i) b(i) = rhs[i];
  Eigen::VectorXd x = m.ldlt().solve(b);
  FieldReal out(rhs.grid);
  for (int i = 0; i < rhs.size(); ++i) out[i] = x(i);
  return out;
}

}  // namespace gldual
