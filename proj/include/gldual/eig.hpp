#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gldual/errors.hpp"
#include "gldual/grid.hpp"
#include "gldual/laplacian.hpp"

namespace gldual {

namespace detail {

/// Number of eigenvalues of tridiag(a, b) strictly below x (Sturm sequence).
inline int sturm_count(const std::vector<double>& a, const std::vector<double>& b, double x) {
  int count = 0;
  double d = 1.0;
  const double tiny = 1e-300;
  for (size_t i = 0; i < a.size(); ++i) {
    const double off = i == 0 ? 0.0 : b[i - 1];
    d = a[i] - x - off * off / d;
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

/// Extremal eigenvalues of a symmetric tridiagonal matrix by bisection.
inline std::pair<double, double> tridiag_extremes(const std::vector<double>& a,
                                                  const std::vector<double>& b) {
  const int m = static_cast<int>(a.size());
  if (m == 1) return {a[0], a[0]};
  // Gershgorin enclosure
  double glo = a[0], ghi = a[0];
  for (int i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(b[i - 1]);
    if (i < m - 1) r += std::abs(b[i]);
    glo = std::min(glo, a[i] - r);
    ghi = std::max(ghi, a[i] + r);
  }
  const double scale = std::max({1.0, std::abs(glo), std::abs(ghi)});
  const double tol = 1e-14 * scale;

  auto bisect = [&](int want_below) {
    // smallest x with sturm_count(x) >= want_below
    double lo = glo - tol, hi = ghi + tol;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (sturm_count(a, b, mid) >= want_below) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  return {bisect(1), bisect(m)};
}

/// One inverse-iteration sweep for tridiag(a, b) at shift lambda; returns the
/// magnitude of the last component of the normalized approximate eigenvector.
/// Thomas solve with guarded pivots (good enough for a stopping bound).
inline double last_component_inverse_iter(const std::vector<double>& a,
                                          const std::vector<double>& b, double lambda) {
  const int m = static_cast<int>(a.size());
  if (m == 1) return 1.0;
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  for (double x : b) scale = std::max(scale, std::abs(x));
  const double guard = 1e-14 * std::max(1.0, scale);

  std::vector<double> y(m, 1.0);
  for (int sweep = 0; sweep < 2; ++sweep) {
    std::vector<double> d(m), rhs = y;
    for (int i = 0; i < m; ++i) d[i] = a[i] - lambda;
    // forward elimination
    for (int i = 0; i < m - 1; ++i) {
      if (std::abs(d[i]) < guard) d[i] = d[i] < 0 ? -guard : guard;
      const double mult = b[i] / d[i];
      d[i + 1] -= mult * b[i];
      rhs[i + 1] -= mult * rhs[i];
    }
    if (std::abs(d[m - 1]) < guard) d[m - 1] = d[m - 1] < 0 ? -guard : guard;
    y[m - 1] = rhs[m - 1] / d[m - 1];
    for (int i = m - 2; i >= 0; --i) y[i] = (rhs[i] - b[i] * y[i + 1]) / d[i];
    double nrm = 0.0;
    for (double x : y) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return 1.0;
    for (double& x : y) x /= nrm;
  }
  return std::abs(y[m - 1]);
}

}  // namespace detail

struct EigOptions {
  double rtol = 1e-10;   // target accuracy relative to the spectral spread
  int max_iters = 0;     // 0 -> N (exhaustion always reachable)
  std::uint64_t seed = 0x2545F4914F6CDD1DULL;
};

/// Extremal eigenvalues (lambda_min, lambda_max) of a symmetric operator.
/// Lanczos with full reorthogonalization; Ritz values from Sturm bisection,
/// stopped on the residual bound beta_m |s_m| or on Krylov exhaustion
/// (m = N reproduces the spectrum exactly). Deterministic for fixed inputs.
template <class Op>
std::pair<double, double> extremal_eigs(const Op& op, EigOptions opts = {}) {
  const int n = op.grid.size();
  FieldReal q(op.grid), w(op.grid);

  if (n == 1) {
    q[0] = 1.0;
    op.apply_into(q, w);
    return {w[0], w[0]};
  }

  const int cap = opts.max_iters > 0 ? opts.max_iters : n;

  std::mt19937_64 rng(opts.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(n)));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto fresh_vector = [&](const std::vector<FieldReal>& basis) {
    FieldReal r(op.grid);
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (int i = 0; i < n; ++i) r[i] = unif(rng);
      for (const FieldReal& v : basis) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += v[i] * r[i];
        axpy(-c, v, r);
      }
      const double nrm = norm2(r);
      if (nrm > 1e-8) {
        for (int i = 0; i < n; ++i) r[i] /= nrm;
        return r;
      }
    }
    throw SolverError("extremal_eigs: failed to draw a vector outside the Krylov space", 0.0);
  };

  std::vector<FieldReal> basis;
  basis.reserve(static_cast<size_t>(std::min(cap, n)));
  std::vector<double> alpha, beta;  // tridiagonal entries; beta[i] couples i,i+1
  q = fresh_vector(basis);
  double beta_prev = 0.0;
  const FieldReal* q_prev = nullptr;

  double op_scale = 1.0;
  std::pair<double, double> ritz{0.0, 0.0};

  for (int m = 1; m <= cap; ++m) {
    op.apply_into(q, w);
    double a = 0.0;
    for (int i = 0; i < n; ++i) a += q[i] * w[i];
    axpy(-a, q, w);
    if (q_prev) axpy(-beta_prev, *q_prev, w);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) {
      for (const FieldReal& v : basis) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += v[i] * w[i];
        axpy(-c, v, w);
      }
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += q[i] * w[i];
      axpy(-c, q, w);
    }
    alpha.push_back(a);
    basis.push_back(q);
    op_scale = std::max(op_scale, std::abs(a));

    const bool exhausted = static_cast<int>(basis.size()) == n;
    const double b = norm2(w);
    const bool breakdown = b <= 1e-13 * op_scale;

    const bool check_now = exhausted || breakdown || m == cap || m % 8 == 0;
    if (check_now) {
      ritz = detail::tridiag_extremes(alpha, beta);
      if (exhausted) return ritz;
      if (!breakdown) {
        const double spread = std::max(opts.rtol, ritz.second - ritz.first);
        const double tol_abs = opts.rtol * std::max(1.0, spread);
        const double bound_lo = b * detail::last_component_inverse_iter(alpha, beta, ritz.first);
        const double bound_hi = b * detail::last_component_inverse_iter(alpha, beta, ritz.second);
        if (m >= std::min(n, 8) && bound_lo <= tol_abs && bound_hi <= tol_abs) return ritz;
      }
    }

    if (breakdown) {
      // invariant subspace found; restart in its orthogonal complement
      beta.push_back(0.0);
      q = fresh_vector(basis);
      q_prev = nullptr;
      beta_prev = 0.0;
    } else {
      beta.push_back(b);
      for (int i = 0; i < n; ++i) w[i] /= b;
      q_prev = &basis.back();
      beta_prev = b;
      q = w;
    }
  }
  throw SolverError("extremal_eigs: iteration cap " + std::to_string(cap) + " exceeded",
                    ritz.second - ritz.first);
}

enum class Definiteness { PositiveDefinite, NegativeDefinite, Indefinite, Singular };

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive_definite";
    case Definiteness::NegativeDefinite: return "negative_definite";
    case Definiteness::Indefinite: return "indefinite";
    case Definiteness::Singular: return "singular";
  }
  return "?";
}

inline Definiteness classify_extremes(double lmin, double lmax, double tol) {
  if (lmin > tol) return Definiteness::PositiveDefinite;
  if (lmax < -tol) return Definiteness::NegativeDefinite;
  if (std::min(std::abs(lmin), std::abs(lmax)) <= tol) return Definiteness::Singular;
  return Definiteness::Indefinite;
}

/// Default classification margin for strict spectral inequalities.
inline double classification_tol(double lmax) { return 1e-8 * std::max(1.0, std::abs(lmax)); }

/// Smallest shift making K I + gamma L positive definite, with headroom:
/// K = (1 + margin) * gamma * lambda_max(-L).
inline double choose_K(const Grid& grid, double gamma, double margin = 0.25) {
  if (!(gamma > 0.0)) throw std::invalid_argument("choose_K: gamma must be positive");
  if (!(margin > 0.0)) throw std::invalid_argument("choose_K: margin must be positive");
  const ShiftedLaplacian neg_lap(grid, -1.0, 0.0);
  const auto [lmin, lmax] = extremal_eigs(neg_lap);
  (void)lmin;
  return (1.0 + margin) * gamma * lmax;
}

}  // namespace gldual
