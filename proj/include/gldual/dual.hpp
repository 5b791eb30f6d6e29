#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gldual/eig.hpp"
#include "gldual/errors.hpp"
#include "gldual/grid.hpp"
#include "gldual/laplacian.hpp"
#include "gldual/linsolve.hpp"
#include "gldual/primal.hpp"

namespace gldual {

// Feasibility margins for the strict dual constraints.
inline double astar_tol(double K) { return 1e-10 * K; }
inline double bstar_tol(double lmin, double lmax) {
  return 1e-10 * std::max(std::abs(lmin), std::abs(lmax));
}

/// Dual pair (v0*, v1*) with membership in
///   A* = { v0* : 2 v0* + K > 0 node-wise }
///   B* = { v0* : -gamma L + 2 v0* positive definite }.
struct DualPoint {
  FieldReal v0s;
  FieldReal v1s;
  bool in_Astar = false;
  bool in_Bstar = false;
};

inline bool is_in_Astar(const GLProblem& p, const FieldReal& v0s, int* worst_node = nullptr) {
  double worst = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int i = 0; i < v0s.size(); ++i) {
    const double m = 2.0 * v0s[i] + p.K;
    if (m < worst) {
      worst = m;
      arg = i;
    }
  }
  if (worst_node) *worst_node = arg;
  return worst > astar_tol(p.K);
}

/// v0^ = alpha (u0^2 - beta),  v1^ = (2 v0^ + K) u0 - f, with membership flags.
inline DualPoint build_dual_point(const GLProblem& p, const FieldReal& u0) {
  require_same_grid(p.grid, u0.grid, "build_dual_point");
  DualPoint d;
  d.v0s = FieldReal(p.grid);
  d.v1s = FieldReal(p.grid);
  for (int i = 0; i < u0.size(); ++i) {
    d.v0s[i] = p.alpha * (u0[i] * u0[i] - p.beta);
    d.v1s[i] = (2.0 * d.v0s[i] + p.K) * u0[i] - p.f[i];
  }
  d.in_Astar = is_in_Astar(p, d.v0s);
  const auto [lmin, lmax] = extremal_eigs(curvature_op(p.grid, p.gamma, d.v0s));
  d.in_Bstar = lmin > bstar_tol(lmin, lmax);
  return d;
}

/// F*(v1*) = 1/2 <v1*, (K I + gamma L)^{-1} v1*>.
inline double eval_Fstar(const GLProblem& p, const FieldReal& v1s,
                         SolveOptions solve = {1e-12, 0}) {
  require_same_grid(p.grid, v1s.grid, "eval_Fstar");
  const FieldReal x = spd_solve(p.shift_op(), v1s, solve);
  return 0.5 * inner(p.grid, v1s, x);
}

/// G*(v1*, v0*) = sum_i w [ (v1_i + f_i)^2 / (2 (2 v0_i + K))
///                          + v0_i^2 / (2 alpha) + beta v0_i ],  v0* in A*.
inline double eval_Gstar(const GLProblem& p, const FieldReal& v1s, const FieldReal& v0s) {
  require_same_grid(p.grid, v1s.grid, "eval_Gstar");
  require_same_grid(p.grid, v0s.grid, "eval_Gstar");
  int worst = 0;
  if (!is_in_Astar(p, v0s, &worst))
    throw FeasibilityError("eval_Gstar: v0* leaves A* (2 v0 + K = " +
                               std::to_string(2.0 * v0s[worst] + p.K) + " at node " +
                               std::to_string(worst) + ")",
                           worst);
  double s = 0.0;
  for (int i = 0; i < v0s.size(); ++i) {
    const double num = v1s[i] + p.f[i];
    s += num * num / (2.0 * (2.0 * v0s[i] + p.K)) + v0s[i] * v0s[i] / (2.0 * p.alpha) +
         p.beta * v0s[i];
  }
  return p.grid.weight * s;
}

/// J*(v1*, v0*) = -G*(v1*, v0*) + F*(v1*).
inline double eval_Jstar(const GLProblem& p, const FieldReal& v1s, const FieldReal& v0s,
                         SolveOptions solve = {1e-12, 0}) {
  return -eval_Gstar(p, v1s, v0s) + eval_Fstar(p, v1s, solve);
}

namespace detail {

/// Node problem of the inner supremum of Jtilde*: maximize over t > -K/2
///   phi(t) = -[ wv^2 / (2 (2t + K)) + t^2 / (2 alpha) + beta t ].
/// Stationarity wv^2/(2t+K)^2 - t/alpha - beta = 0 becomes, in s = 2t + K,
/// the cubic  s^3 + (2 alpha beta - K) s^2 - 2 alpha wv^2 = 0, which has
/// exactly one positive root when wv != 0.
struct NodeArgmax {
  double t;
  double phi;
};

inline NodeArgmax jtilde_node_sup(double wv, double alpha, double beta, double K, int node) {
  const double c = 2.0 * alpha * beta - K;
  const double rhs = 2.0 * alpha * wv * wv;
  double s;
  if (rhs == 0.0) {
    // stationary point t = -alpha beta must itself lie in A*
    s = K - 2.0 * alpha * beta;
    if (s <= astar_tol(K))
      throw FeasibilityError(
          "reduced_Jtilde: node " + std::to_string(node) +
              " has no A*-feasible stationary point (v1* + f = 0 and K <= 2 alpha beta)",
          node);
  } else {
    // bracket [0, s_hi]: p(0) < 0 <= p(s_hi)
    const double t_max = alpha * std::max(0.0, wv * wv / (K * K) - beta) + alpha * beta;
    double lo = 0.0, hi = 2.0 * t_max + K;
    auto p_of = [&](double x) { return (x + c) * x * x - rhs; };
    s = hi;
    for (int it = 0; it < 200; ++it) {
      const double pv = p_of(s);
      if (pv > 0.0) hi = s;
      else lo = s;
      const double dp = 3.0 * s * s + 2.0 * c * s;
      double next = dp > 0.0 ? s - pv / dp : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-16 * std::max(1.0, std::abs(s))) {
        s = next;
        break;
      }
      s = next;
    }
  }
  const double t = 0.5 * (s - K);
  const double phi = -(wv * wv / (2.0 * s) + t * t / (2.0 * alpha) + beta * t);
  return {t, phi};
}

}  // namespace detail

struct ReducedValue {
  double value;
  FieldReal arg;  // the inner optimizer (v0* for Jtilde, v1* for J1/J2)
};

/// Jtilde*(v1*) = sup_{v0* in A*} J*(v1*, v0*); the sup decouples node-wise.
/// Returns the attained value and the argmax field.
inline ReducedValue reduced_Jtilde(const GLProblem& p, const FieldReal& v1s,
                                   SolveOptions solve = {1e-12, 0}) {
  require_same_grid(p.grid, v1s.grid, "reduced_Jtilde");
  FieldReal v0(p.grid);
  double acc = 0.0;
  for (int i = 0; i < v1s.size(); ++i) {
    const auto node = detail::jtilde_node_sup(v1s[i] + p.f[i], p.alpha, p.beta, p.K, i);
    v0[i] = node.t;
    acc += node.phi;
  }
  const double value = eval_Fstar(p, v1s, solve) + p.grid.weight * acc;
  return {value, std::move(v0)};
}

namespace detail {

/// Stationary v1* of J*(., v0*): substituting v1* = (K I + gamma L) x turns
/// (K I + gamma L)^{-1} v1* = (v1* + f) / (2 v0* + K) into
/// (-gamma L + 2 v0*) x = f.
inline FieldReal stationary_v1(const GLProblem& p, const ShiftedLaplacian& curv,
                               bool negate_system, SolveOptions solve) {
  FieldReal rhs = p.f;
  FieldReal x(p.grid);
  if (negate_system) {
    ShiftedLaplacian neg(p.grid, -curv.lap_coeff, curv.diag);
    for (double& d : neg.diag) d = -d;
    for (int i = 0; i < rhs.size(); ++i) rhs[i] = -rhs[i];
    x = spd_solve(neg, rhs, solve);
  } else {
    x = spd_solve(curv, rhs, solve);
  }
  return p.shift_op().apply(x);
}

}  // namespace detail

/// J1*(v0*) = inf_{v1*} J*(v1*, v0*); requires -gamma L + 2 v0* > 0.
inline ReducedValue reduced_J1(const GLProblem& p, const FieldReal& v0s,
                               SolveOptions solve = {1e-12, 0}) {
  require_same_grid(p.grid, v0s.grid, "reduced_J1");
  int worst = 0;
  if (!is_in_Astar(p, v0s, &worst))
    throw FeasibilityError("reduced_J1: v0* leaves A* at node " + std::to_string(worst), worst);
  const ShiftedLaplacian curv = curvature_op(p.grid, p.gamma, v0s);
  const auto [lmin, lmax] = extremal_eigs(curv);
  if (!(lmin > bstar_tol(lmin, lmax)))
    throw HypothesisError(
        "reduced_J1: -gamma L + 2 v0* is not positive definite (lambda_min = " +
            std::to_string(lmin) + "); the stationary point is not an infimum, use "
            "reduced_J2_over_v1 when the operator is negative definite",
        "Bstar");
  FieldReal v1 = detail::stationary_v1(p, curv, false, solve);
  const double value = eval_Jstar(p, v1, v0s, solve);
  return {value, std::move(v1)};
}

/// J2*(v0*) = sup_{v1*} J*(v1*, v0*); requires -gamma L + 2 v0* < 0.
inline ReducedValue reduced_J2_over_v1(const GLProblem& p, const FieldReal& v0s,
                                       SolveOptions solve = {1e-12, 0}) {
  require_same_grid(p.grid, v0s.grid, "reduced_J2_over_v1");
  int worst = 0;
  if (!is_in_Astar(p, v0s, &worst))
    throw FeasibilityError("reduced_J2_over_v1: v0* leaves A* at node " + std::to_string(worst),
                           worst);
  const ShiftedLaplacian curv = curvature_op(p.grid, p.gamma, v0s);
  const auto [lmin, lmax] = extremal_eigs(curv);
  if (!(lmax < -bstar_tol(lmin, lmax)))
    throw HypothesisError(
        "reduced_J2_over_v1: -gamma L + 2 v0* is not negative definite (lambda_max = " +
            std::to_string(lmax) + "); use reduced_J1 when it is positive definite",
        "Bstar_negative");
  FieldReal v1 = detail::stationary_v1(p, curv, true, solve);
  const double value = eval_Jstar(p, v1, v0s, solve);
  return {value, std::move(v1)};
}

/// Membership in the global-optimality sets of the beta-parameterized dual:
///   B1 = { v0* : 2 v0* + K > 0 },
///   B2 = { v0* : gamma/2 <grad u, grad u> + <v0* u, u> > 0 for u != 0 },
/// the latter tested as lambda_min(-(gamma/2) L + diag(v0*)) > 0.
inline std::pair<bool, bool> membership_C(const GLProblem& p, const FieldReal& v0s) {
  require_same_grid(p.grid, v0s.grid, "membership_C");
  const bool b1 = is_in_Astar(p, v0s);
  ShiftedLaplacian op(p.grid, -0.5 * p.gamma, v0s.v);
  const auto [lmin, lmax] = extremal_eigs(op);
  const bool b2 = lmin > bstar_tol(lmin, lmax);
  return {b1, b2};
}

/// J2*(v1*) = sup_{v0* in A* cap B*} J*(v1*, v0*), reported as a certified
/// lower bound: when the unconstrained node-wise argmax is feasible the bound
/// is the supremum itself; otherwise the argmax is pulled back toward the
/// strictly feasible center K/2 and seeded feasible candidates are sampled.
inline double reduced_J2_global(const GLProblem& p, const FieldReal& v1s, int sampler_budget,
                                SolveOptions solve = {1e-12, 0}) {
  if (sampler_budget < 1)
    throw std::invalid_argument("reduced_J2_global: sampler_budget must be >= 1");
  auto feasible = [&](const FieldReal& v0) {
    if (!is_in_Astar(p, v0)) return false;
    const auto [lmin, lmax] = extremal_eigs(curvature_op(p.grid, p.gamma, v0));
    return lmin > bstar_tol(lmin, lmax);
  };

  const ReducedValue unconstrained = reduced_Jtilde(p, v1s, solve);
  if (feasible(unconstrained.arg)) return unconstrained.value;

  const FieldReal center(p.grid, 0.5 * p.K);
  std::optional<double> best;
  auto consider = [&](const FieldReal& v0) {
    if (!feasible(v0)) return;
    const double val = eval_Jstar(p, v1s, v0, solve);
    if (!best || val > *best) best = val;
  };

  // bisect along the segment from the infeasible argmax to the feasible center
  double theta_lo = 0.0, theta_hi = 1.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (theta_lo + theta_hi);
    FieldReal v0(p.grid);
    for (int i = 0; i < v0.size(); ++i)
      v0[i] = (1.0 - mid) * unconstrained.arg[i] + mid * center[i];
    if (feasible(v0)) {
      consider(v0);
      theta_hi = mid;
    } else {
      theta_lo = mid;
    }
  }
  consider(center);

  std::mt19937_64 rng(0xC0FFEE1234ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int k = 0; k < sampler_budget; ++k) {
    FieldReal v0(p.grid);
    const double radius = 0.25 * p.K * (1.0 + k % 4);
    for (int i = 0; i < v0.size(); ++i) v0[i] = 0.5 * p.K + radius * unif(rng);
    consider(v0);
  }
  if (!best)
    throw SolverError("reduced_J2_global: no feasible candidate found", 0.0);
  return *best;
}

enum class TheoremCase {
  T1Item1,
  T1Item2,
  T1Item3,
  T2Case1,
  T2Case2,
  T2Case3,
  T4Global,
};

inline const char* to_string(TheoremCase c) {
  switch (c) {
    case TheoremCase::T1Item1: return "t1_item1";
    case TheoremCase::T1Item2: return "t1_item2";
    case TheoremCase::T1Item3: return "t1_item3";
    case TheoremCase::T2Case1: return "t2_case1";
    case TheoremCase::T2Case2: return "t2_case2";
    case TheoremCase::T2Case3: return "t2_case3";
    case TheoremCase::T4Global: return "t4_global";
  }
  return "?";
}

inline std::optional<TheoremCase> theorem_case_from_string(const std::string& s) {
  for (TheoremCase c : {TheoremCase::T1Item1, TheoremCase::T1Item2, TheoremCase::T1Item3,
                        TheoremCase::T2Case1, TheoremCase::T2Case2, TheoremCase::T2Case3,
                        TheoremCase::T4Global}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

struct GapReport {
  double J_primal = 0.0;
  double J_dual = 0.0;
  double gap = 0.0;      // J_primal - J_dual
  double rel_gap = 0.0;  // |gap| / max(1, |J_primal|)
  TheoremCase theorem_case = TheoremCase::T1Item1;
  bool passed = false;
};

/// Checks the zero-duality-gap identity for the named theorem case.  The
/// dual-side value is computed through the reduced functional the case names;
/// hypothesis violations (wrong Hessian class, membership flags) throw.
inline GapReport verify_gap(const GLProblem& p, const CriticalPoint& cp, TheoremCase which,
                            double gap_tol, SolveOptions solve = {1e-12, 0}) {
  const double res = norm2(grad_J(p, cp.u0));
  if (!(res <= cp.newton_tol))
    throw HypothesisError("verify_gap: point is not critical (residual " + std::to_string(res) +
                              " > newton_tol " + std::to_string(cp.newton_tol) + ")",
                          "residual");
  const DualPoint dp = build_dual_point(p, cp.u0);
  const bool pd = cp.hessian_class == Definiteness::PositiveDefinite;
  const bool nd = cp.hessian_class == Definiteness::NegativeDefinite;

  auto require = [&](bool ok, const char* flag) {
    if (!ok)
      throw HypothesisError(std::string("verify_gap: hypothesis of ") + to_string(which) +
                                " fails: " + flag,
                            flag);
  };

  double dual = 0.0;
  switch (which) {
    case TheoremCase::T1Item1:
      require(dp.in_Astar, "v0^ in A*");
      require(pd, "hessian positive definite");
      dual = reduced_Jtilde(p, dp.v1s, solve).value;
      break;
    case TheoremCase::T1Item2:
      require(dp.in_Astar, "v0^ in A*");
      require(dp.in_Bstar, "v0^ in B*");
      dual = reduced_J2_global(p, dp.v1s, 32, solve);
      break;
    case TheoremCase::T1Item3:
      require(dp.in_Astar, "v0^ in A*");
      require(nd, "hessian negative definite");
      dual = reduced_Jtilde(p, dp.v1s, solve).value;
      break;
    case TheoremCase::T2Case1:
      require(dp.in_Astar, "v0^ in A*");
      require(pd, "hessian positive definite");
      require(dp.in_Bstar, "-gamma L + 2 v0^ positive definite");
      dual = reduced_J1(p, dp.v0s, solve).value;
      break;
    case TheoremCase::T2Case2:
    case TheoremCase::T2Case3: {
      require(dp.in_Astar, "v0^ in A*");
      if (which == TheoremCase::T2Case2) require(pd, "hessian positive definite");
      else require(nd, "hessian negative definite");
      const auto [lmin, lmax] = extremal_eigs(curvature_op(p.grid, p.gamma, dp.v0s));
      require(lmax < -bstar_tol(lmin, lmax), "-gamma L + 2 v0^ negative definite");
      dual = reduced_J2_over_v1(p, dp.v0s, solve).value;
      break;
    }
    case TheoremCase::T4Global: {
      const auto [b1, b2] = membership_C(p, dp.v0s);
      require(b1, "v0^ in B1");
      require(b2, "v0^ in B2");
      dual = reduced_J1(p, dp.v0s, solve).value;
      break;
    }
  }

  GapReport r;
  r.J_primal = eval_J(p, cp.u0);
  r.J_dual = dual;
  r.gap = r.J_primal - r.J_dual;
  r.rel_gap = std::abs(r.gap) / std::max(1.0, std::abs(r.J_primal));
  r.theorem_case = which;
  r.passed = r.rel_gap <= gap_tol;
  return r;
}

/// Convenience dispatch from the membership/definiteness flags; the explicit
/// caller-named path above stays canonical.
inline std::optional<TheoremCase> suggest_theorem_case(const CriticalPoint& cp,
                                                       const DualPoint& dp) {
  if (!dp.in_Astar) return std::nullopt;
  if (cp.hessian_class == Definiteness::PositiveDefinite)
    return dp.in_Bstar ? TheoremCase::T1Item2 : TheoremCase::T1Item1;
  if (cp.hessian_class == Definiteness::NegativeDefinite) return TheoremCase::T1Item3;
  return std::nullopt;
}

/// Dense central-difference Hessian of a field functional.  Probes (i,j) and
/// (j,i) independently so the symmetry defect of the result is observable.
inline Eigen::MatrixXd fd_hessian(const std::function<double(const FieldReal&)>& F,
                                  const FieldReal& x0, double eps) {
  const int n = x0.size();
  Eigen::MatrixXd H(n, n);
  const double f0 = F(x0);
  auto probe = [&](int i, double si, int j, double sj) {
    FieldReal x = x0;
    x[i] += si * eps;
    x[j] += sj * eps;
    return F(x);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v;
      try {
        if (i == j) {
          v = (probe(i, +1, i, 0) - 2.0 * f0 + probe(i, -1, i, 0)) / (eps * eps);
        } else {
          v = (probe(i, +1, j, +1) - probe(i, +1, j, -1) - probe(i, -1, j, +1) +
               probe(i, -1, j, -1)) /
              (4.0 * eps * eps);
        }
      } catch (const std::exception& e) {
        throw SolverError("fd_hessian: inner solve failed at probe (" + std::to_string(i) + "," +
                              std::to_string(j) + "): " + e.what(),
                          0.0);
      }
      H(i, j) = v;
    }
  }
  return H;
}

struct ReducedHessianProbe {
  bool built = false;
  std::string functional;  // "Jtilde", "J1" or "J2"
  double symmetry_defect = 0.0;  // max|H - H^T| / max(1, max|H|)
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Definiteness cls = Definiteness::Singular;
};

struct SecondDerivativeReport {
  Definiteness primal_class = Definiteness::Singular;
  Definiteness curvature_class = Definiteness::Singular;  // -gamma L + 2 v0^
  ReducedHessianProbe tilde;    // Jtilde* probed in v1* at v1^
  ReducedHessianProbe reduced;  // J1*/J2* probed in v0* at v0^
  bool t1_checked = false, t1_ok = false;
  bool t2_checked = false, t2_ok = false;
  bool symmetry_ok = false;
  bool passed = false;
};

namespace detail {

inline ReducedHessianProbe probe_functional(const std::function<double(const FieldReal&)>& F,
                                            const FieldReal& at, double eps,
                                            const std::string& name) {
  ReducedHessianProbe pr;
  pr.functional = name;
  const Eigen::MatrixXd H = fd_hessian(F, at, eps);
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  pr.symmetry_defect = (H - H.transpose()).cwiseAbs().maxCoeff() / scale;
  const Eigen::MatrixXd Hs = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs);
  pr.lambda_min = es.eigenvalues().minCoeff();
  pr.lambda_max = es.eigenvalues().maxCoeff();
  const double tol = 1e-7 * std::max(1.0, std::max(std::abs(pr.lambda_min), std::abs(pr.lambda_max)));
  pr.cls = classify_extremes(pr.lambda_min, pr.lambda_max, tol);
  pr.built = true;
  return pr;
}

}  // namespace detail

/// Verifies the definiteness correspondences between the primal Hessian and
/// the finite-difference Hessians of the reduced dual functionals:
///   primal > 0  =>  Jtilde* convex at v1^;   primal < 0  =>  concave;
///   primal > 0 and -gamma L + 2 v0^ > 0  =>  J1* concave at v0^;
///   primal > 0 and -gamma L + 2 v0^ < 0  =>  J2* convex at v0^;
///   primal < 0                            =>  J2* concave at v0^.
inline SecondDerivativeReport verify_second_derivative_correspondence(
    const GLProblem& p, const CriticalPoint& cp, double probe_eps,
    SolveOptions solve = {1e-12, 0, true}) {
  if (p.grid.size() > 64)
    throw std::invalid_argument(
        "verify_second_derivative_correspondence: dense probing is limited to N <= 64");
  const double res = norm2(grad_J(p, cp.u0));
  if (!(res <= cp.newton_tol))
    throw HypothesisError("verify_second_derivative_correspondence: point is not critical",
                          "residual");
  const DualPoint dp = build_dual_point(p, cp.u0);

  SecondDerivativeReport rep;
  rep.primal_class = cp.hessian_class;
  const auto [clmin, clmax] = extremal_eigs(curvature_op(p.grid, p.gamma, dp.v0s));
  rep.curvature_class = classify_extremes(clmin, clmax, bstar_tol(clmin, clmax));

  if (dp.in_Astar) {
    rep.tilde = detail::probe_functional(
        [&](const FieldReal& v) { return reduced_Jtilde(p, v, solve).value; }, dp.v1s, probe_eps,
        "Jtilde");
  }
  if (rep.curvature_class == Definiteness::PositiveDefinite) {
    rep.reduced = detail::probe_functional(
        [&](const FieldReal& v) { return reduced_J1(p, v, solve).value; }, dp.v0s, probe_eps,
        "J1");
  } else if (rep.curvature_class == Definiteness::NegativeDefinite) {
    rep.reduced = detail::probe_functional(
        [&](const FieldReal& v) { return reduced_J2_over_v1(p, v, solve).value; }, dp.v0s,
        probe_eps, "J2");
  }

  const bool pd = rep.primal_class == Definiteness::PositiveDefinite;
  const bool nd = rep.primal_class == Definiteness::NegativeDefinite;
  if (rep.tilde.built && (pd || nd)) {
    rep.t1_checked = true;
    rep.t1_ok = pd ? rep.tilde.cls == Definiteness::PositiveDefinite
                   : rep.tilde.cls == Definiteness::NegativeDefinite;
  }
  if (rep.reduced.built && (pd || nd)) {
    rep.t2_checked = true;
    if (pd && rep.curvature_class == Definiteness::PositiveDefinite)
      rep.t2_ok = rep.reduced.cls == Definiteness::NegativeDefinite;
    else if (pd && rep.curvature_class == Definiteness::NegativeDefinite)
      rep.t2_ok = rep.reduced.cls == Definiteness::PositiveDefinite;
    else if (nd)
      rep.t2_ok = rep.curvature_class == Definiteness::NegativeDefinite &&
                  rep.reduced.cls == Definiteness::NegativeDefinite;
  }
  rep.symmetry_ok = (!rep.tilde.built || rep.tilde.symmetry_defect <= 1e-6) &&
                    (!rep.reduced.built || rep.reduced.symmetry_defect <= 1e-6);
  rep.passed = rep.symmetry_ok && (!rep.t1_checked || rep.t1_ok) &&
               (!rep.t2_checked || rep.t2_ok) && (rep.t1_checked || rep.t2_checked);
  return rep;
}

struct WeakDualityReport {
  int n_samples = 0;
  double min_slack = 0.0;
  std::vector<double> slacks;
};

/// Returns a C*-feasible field: `raw` blended toward the strictly feasible
/// constant K/2 until both membership flags hold.
inline FieldReal project_to_Cstar(const GLProblem& p, const FieldReal& raw) {
  auto feasible = [&](const FieldReal& v) {
    const auto [b1, b2] = membership_C(p, v);
    return b1 && b2;
  };
  if (feasible(raw)) return raw;
  const double center = 0.5 * p.K;
  double theta_lo = 0.0, theta_hi = 1.0;
  FieldReal best(p.grid, center);
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (theta_lo + theta_hi);
    FieldReal v(p.grid);
    for (int i = 0; i < v.size(); ++i) v[i] = (1.0 - mid) * raw[i] + mid * center;
    if (feasible(v)) {
      best = v;
      theta_hi = mid;
    } else {
      theta_lo = mid;
    }
  }
  return best;
}

/// Weak duality J(u) >= J1*(v0*) for seeded random u and C*-feasible v0*.
inline WeakDualityReport weak_duality_sample(const GLProblem& p, int n_samples,
                                             std::uint64_t seed,
                                             SolveOptions solve = {1e-12, 0}) {
  if (n_samples < 1) throw std::invalid_argument("weak_duality_sample: n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double u_scale = 1.5 * std::sqrt(p.beta);

  WeakDualityReport rep;
  rep.n_samples = n_samples;
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.slacks.reserve(static_cast<size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k) {
    FieldReal u(p.grid), raw(p.grid);
    for (int i = 0; i < u.size(); ++i) u[i] = u_scale * unif(rng);
    for (int i = 0; i < raw.size(); ++i) raw[i] = 0.25 * p.K + 0.75 * p.K * unif(rng);
    const FieldReal v0 = project_to_Cstar(p, raw);
    const double slack = eval_J(p, u) - reduced_J1(p, v0, solve).value;
    rep.slacks.push_back(slack);
    rep.min_slack = std::min(rep.min_slack, slack);
  }
  return rep;
}

}  // namespace gldual
