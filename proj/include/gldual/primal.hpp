#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "gldual/eig.hpp"
#include "gldual/errors.hpp"
#include "gldual/grid.hpp"
#include "gldual/laplacian.hpp"
#include "gldual/linsolve.hpp"

namespace gldual {

/// Data of the double-well energy
///   J(u) = gamma/2 <u, -L u> + alpha/2 * sum_i w (u_i^2 - beta)^2 - <u, f>
/// together with the shift K that makes F(u) = 1/2 <u, (K I + gamma L) u>
/// positive for u != 0.
struct GLProblem {
  Grid grid;
  double gamma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double K = 0.0;
  FieldReal f;

  static GLProblem make(const Grid& grid, double gamma, double alpha, double beta,
                        FieldReal f, double K) {
    if (!(gamma > 0 && alpha > 0 && beta > 0 && K > 0))
      throw std::invalid_argument("GLProblem: gamma, alpha, beta, K must be positive");
    require_same_grid(grid, f.grid, "GLProblem");
    GLProblem p{grid, gamma, alpha, beta, K, std::move(f)};
    const auto [lmin, lmax] = extremal_eigs(p.shift_op());
    (void)lmax;
    if (!(lmin > 0))
      throw std::invalid_argument("GLProblem: K I + gamma L is not positive definite (K too small)");
    return p;
  }

  /// K I + gamma L
  ShiftedLaplacian shift_op() const { return shifted_identity_op(grid, K, gamma); }
};

inline double eval_J(const GLProblem& p, const FieldReal& u) {
  require_same_grid(p.grid, u.grid, "eval_J");
  const FieldReal lu = LaplacianOp(p.grid).apply(u);
  double dirichlet = 0.0, well = 0.0, source = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    dirichlet += u[i] * (-lu[i]);
    const double d = u[i] * u[i] - p.beta;
    well += d * d;
    source += u[i] * p.f[i];
  }
  const double w = p.grid.weight;
  return 0.5 * p.gamma * w * dirichlet + 0.5 * p.alpha * w * well - w * source;
}

/// Euler-Lagrange residual field -gamma L u + 2 alpha (u^2 - beta) u - f.
/// The Euclidean gradient of eval_J is this field scaled by the quadrature
/// weight: grad eval_J = weight * grad_J.
inline FieldReal grad_J(const GLProblem& p, const FieldReal& u) {
  require_same_grid(p.grid, u.grid, "grad_J");
  FieldReal g = LaplacianOp(p.grid).apply(u);
  for (int i = 0; i < u.size(); ++i) {
    g[i] = -p.gamma * g[i] + 2.0 * p.alpha * (u[i] * u[i] - p.beta) * u[i] - p.f[i];
  }
  return g;
}

/// Second derivative -gamma L + diag(6 alpha u^2 - 2 alpha beta).
inline ShiftedLaplacian hess_J(const GLProblem& p, const FieldReal& u) {
  require_same_grid(p.grid, u.grid, "hess_J");
  std::vector<double> d(static_cast<size_t>(u.size()));
  for (int i = 0; i < u.size(); ++i)
    d[static_cast<size_t>(i)] = 6.0 * p.alpha * u[i] * u[i] - 2.0 * p.alpha * p.beta;
  return ShiftedLaplacian(p.grid, -p.gamma, std::move(d));
}

template <class Op>
Definiteness classify_hessian(const Op& op, double tol) {
  const auto [lmin, lmax] = extremal_eigs(op);
  return classify_extremes(lmin, lmax, tol);
}

struct CriticalPoint {
  FieldReal u0;
  double residual_norm = 0.0;  // Euclidean norm of grad_J(u0)
  double newton_tol = 0.0;     // tolerance it was certified at
  Definiteness hessian_class = Definiteness::Singular;
  double lambda_min_J2 = 0.0;
  double lambda_max_J2 = 0.0;
  int iterations = 0;
};

struct NewtonOptions {
  int max_iters = 100;
  double cg_rtol = 1e-12;
};

/// Damped Newton search for grad_J(u) = 0: backtracking on |grad| with a
/// Levenberg diagonal shift whenever the Hessian solve reports indefiniteness
/// or stalls. Classification of the converged point comes from extremal_eigs.
inline CriticalPoint find_critical_point(const GLProblem& p, const FieldReal& u_init,
                                         double newton_tol, NewtonOptions opts = {}) {
  if (!(newton_tol > 0)) throw std::invalid_argument("find_critical_point: newton_tol must be positive");
  require_same_grid(p.grid, u_init.grid, "find_critical_point");

  FieldReal u = u_init;
  FieldReal g = grad_J(p, u);
  double gn = norm2(g);
  int it = 0;
  for (; it < opts.max_iters && gn > newton_tol; ++it) {
    ShiftedLaplacian H = hess_J(p, u);
    FieldReal rhs(p.grid);
    for (int i = 0; i < rhs.size(); ++i) rhs[i] = -g[i];

    double mu = 0.0;
    double scale = 0.0;
    for (double d : H.diag) scale = std::max(scale, std::abs(d));
    scale = std::max(scale, 1.0);
    FieldReal step(p.grid);
    bool solved = false;
    for (int shift_try = 0; shift_try < 40 && !solved; ++shift_try) {
      ShiftedLaplacian Hs = H;
      if (mu > 0.0)
        for (double& d : Hs.diag) d += mu;
      try {
        step = spd_solve(Hs, rhs, SolveOptions{opts.cg_rtol, 0});
        solved = true;
      } catch (const IndefiniteOperatorError&) {
        mu = mu == 0.0 ? 1e-4 * scale : 4.0 * mu;
      } catch (const SolverError&) {
        mu = mu == 0.0 ? 1e-4 * scale : 4.0 * mu;
      }
    }
    if (!solved)
      throw SolverError("find_critical_point: Hessian solve failed even with Levenberg shift", gn);

    // backtrack on the residual norm
    double s = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      FieldReal trial = u;
      axpy(s, step, trial);
      FieldReal gt = grad_J(p, trial);
      const double gtn = norm2(gt);
      if (gtn <= (1.0 - 1e-4 * s) * gn) {
        u = std::move(trial);
        g = std::move(gt);
        gn = gtn;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted)
      throw SolverError("find_critical_point: line search failed (residual " +
                            std::to_string(gn) + ")",
                        gn);
  }
  if (gn > newton_tol)
    throw SolverError("find_critical_point: no convergence in " + std::to_string(opts.max_iters) +
                          " iterations (residual " + std::to_string(gn) + ")",
                      gn);

  const auto [lmin, lmax] = extremal_eigs(hess_J(p, u));
  CriticalPoint cp;
  cp.u0 = std::move(u);
  cp.residual_norm = gn;
  cp.newton_tol = newton_tol;
  cp.lambda_min_J2 = lmin;
  cp.lambda_max_J2 = lmax;
  cp.hessian_class = classify_extremes(lmin, lmax, classification_tol(lmax));
  cp.iterations = it;
  return cp;
}

/// Source term that makes a chosen field u0 exactly critical:
/// f = -gamma L u0 + 2 alpha (u0^2 - beta) u0.
inline FieldReal manufactured_source(const Grid& grid, double gamma, double alpha, double beta,
                                     const FieldReal& u0) {
  FieldReal f = LaplacianOp(grid).apply(u0);
  for (int i = 0; i < f.size(); ++i)
    f[i] = -gamma * f[i] + 2.0 * alpha * (u0[i] * u0[i] - beta) * u0[i];
  return f;
}

}  // namespace gldual
