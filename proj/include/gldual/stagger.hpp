#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "gldual/errors.hpp"

namespace gldual {

using Complex = std::complex<double>;

/// 2D staggered lattice for the magnetic problem: scalar fields on the nodes
/// of the enclosing box Omega_1 (boundary included), vector fields on cell
/// edges, curl on cells.  The order parameter lives on a rectangular node
/// mask Omega strictly inside Omega_1 and is extended by zero outside it.
/// With this staggering curl(grad chi) = 0 holds exactly.
struct StaggeredGrid {
  int mx = 0, my = 0;    // Omega_1 nodes per axis
  double hx = 0, hy = 0;
  int i0 = 0, j0 = 0;    // mask origin (node indices)
  int mw = 0, mh = 0;    // mask extent in nodes

  std::vector<int> mask_edges;  // edges carrying the covariant gradient

  int n_nodes() const { return mx * my; }
  int n_ex() const { return (mx - 1) * my; }
  int n_ey() const { return mx * (my - 1); }
  int n_edges() const { return n_ex() + n_ey(); }
  int n_cells() const { return (mx - 1) * (my - 1); }
  int n_mask() const { return mw * mh; }
  double weight() const { return hx * hy; }

  int node(int i, int j) const { return i + mx * j; }
  int ex_edge(int i, int j) const { return i + (mx - 1) * j; }           // (i,j)-(i+1,j)
  int ey_edge(int i, int j) const { return n_ex() + i + mx * j; }       // (i,j)-(i,j+1)
  int cell(int i, int j) const { return i + (mx - 1) * j; }
  bool in_mask(int i, int j) const {
    return i >= i0 && i < i0 + mw && j >= j0 && j < j0 + mh;
  }
  int mask_index(int i, int j) const { return (i - i0) + mw * (j - j0); }

  double node_x(int i) const { return i * hx; }
  double node_y(int j) const { return j * hy; }
};

/// Mask gets `margin` extra cells between it and the Omega_1 boundary ring.
inline StaggeredGrid make_staggered_grid(int mask_w, int mask_h, double hx, double hy,
                                         int margin = 2) {
  if (mask_w < 1 || mask_h < 1) throw std::invalid_argument("staggered grid: empty mask");
  if (margin < 2) throw std::invalid_argument("staggered grid: mask needs >= 2 cells of margin");
  if (!(hx > 0 && hy > 0)) throw std::invalid_argument("staggered grid: spacing must be positive");
  StaggeredGrid g;
  g.hx = hx;
  g.hy = hy;
  g.i0 = margin + 1;
  g.j0 = margin + 1;
  g.mw = mask_w;
  g.mh = mask_h;
  g.mx = mask_w + 2 * (margin + 1);
  g.my = mask_h + 2 * (margin + 1);
  // x-edges touching the mask: base or tip node inside
  for (int j = g.j0; j < g.j0 + g.mh; ++j)
    for (int i = g.i0 - 1; i < g.i0 + g.mw; ++i) g.mask_edges.push_back(g.ex_edge(i, j));
  for (int j = g.j0 - 1; j < g.j0 + g.mh; ++j)
    for (int i = g.i0; i < g.i0 + g.mw; ++i) g.mask_edges.push_back(g.ey_edge(i, j));
  return g;
}

/// Edge-sampled real vector field on Omega_1 (x-edges first, then y-edges).
struct VectorField {
  std::vector<double> v;
  explicit VectorField(const StaggeredGrid& g, double fill = 0.0)
      : v(static_cast<size_t>(g.n_edges()), fill) {}
  VectorField() = default;
  double& operator[](int e) { return v[static_cast<size_t>(e)]; }
  double operator[](int e) const { return v[static_cast<size_t>(e)]; }
};

/// Complex node field on the mask.
struct FieldComplex {
  std::vector<Complex> v;
  explicit FieldComplex(const StaggeredGrid& g, Complex fill = {})
      : v(static_cast<size_t>(g.n_mask()), fill) {}
  FieldComplex() = default;
  Complex& operator[](int m) { return v[static_cast<size_t>(m)]; }
  Complex operator[](int m) const { return v[static_cast<size_t>(m)]; }
};

/// Complex edge field (used for the dual variable v1*).
struct EdgeFieldC {
  std::vector<Complex> v;
  explicit EdgeFieldC(const StaggeredGrid& g, Complex fill = {})
      : v(static_cast<size_t>(g.n_edges()), fill) {}
  EdgeFieldC() = default;
  Complex& operator[](int e) { return v[static_cast<size_t>(e)]; }
  Complex operator[](int e) const { return v[static_cast<size_t>(e)]; }
};

namespace stagger {

inline void check_size(size_t got, int want, const char* what) {
  if (got != static_cast<size_t>(want))
    throw GridMismatchError(std::string(what) + ": field size mismatch");
}

/// phi extended by zero outside the mask.
inline Complex phi_at(const StaggeredGrid& g, const FieldComplex& phi, int i, int j) {
  return g.in_mask(i, j) ? phi[g.mask_index(i, j)] : Complex{};
}

struct EdgeEnds {
  int bi, bj, ti, tj;  // base and tip node coordinates
  double h;
  bool is_x;
};

inline EdgeEnds edge_ends(const StaggeredGrid& g, int e) {
  if (e < g.n_ex()) {
    const int i = e % (g.mx - 1), j = e / (g.mx - 1);
    return {i, j, i + 1, j, g.hx, true};
  }
  const int k = e - g.n_ex();
  const int i = k % g.mx, j = k / g.mx;
  return {i, j, i, j + 1, g.hy, false};
}

/// Covariant gradient (grad - i rho A) phi on the mask edges (zero elsewhere);
/// forward difference with the A-coupling at the base node.
inline EdgeFieldC cov_grad(const StaggeredGrid& g, double rho, const VectorField& A,
                           const FieldComplex& phi) {
  check_size(A.v.size(), g.n_edges(), "cov_grad");
  check_size(phi.v.size(), g.n_mask(), "cov_grad");
  EdgeFieldC out(g);
  for (int e : g.mask_edges) {
    const EdgeEnds ee = edge_ends(g, e);
    const Complex pb = phi_at(g, phi, ee.bi, ee.bj);
    const Complex pt = phi_at(g, phi, ee.ti, ee.tj);
    out[e] = (pt - pb) / ee.h - Complex(0.0, rho) * A[e] * pb;
  }
  return out;
}

/// Exact adjoint of cov_grad under the uniform-weight real pairing:
/// <v, cov_grad(phi)>_edges = <cov_grad_adjoint(v), phi>_mask for all phi, v.
inline FieldComplex cov_grad_adjoint(const StaggeredGrid& g, double rho, const VectorField& A,
                                     const EdgeFieldC& v) {
  check_size(A.v.size(), g.n_edges(), "cov_grad_adjoint");
  check_size(v.v.size(), g.n_edges(), "cov_grad_adjoint");
  FieldComplex out(g);
  for (int e : g.mask_edges) {
    const EdgeEnds ee = edge_ends(g, e);
    if (g.in_mask(ee.ti, ee.tj)) out[g.mask_index(ee.ti, ee.tj)] += v[e] / ee.h;
    if (g.in_mask(ee.bi, ee.bj)) {
      const int m = g.mask_index(ee.bi, ee.bj);
      out[m] -= v[e] / ee.h;
      out[m] += Complex(0.0, rho) * A[e] * v[e];
    }
  }
  return out;
}

/// Discrete gradient of a node scalar onto all edges of Omega_1.
inline VectorField grad_full(const StaggeredGrid& g, const std::vector<double>& chi) {
  check_size(chi.size(), g.n_nodes(), "grad_full");
  VectorField out(g);
  for (int j = 0; j < g.my; ++j)
    for (int i = 0; i + 1 < g.mx; ++i)
      out[g.ex_edge(i, j)] = (chi[g.node(i + 1, j)] - chi[g.node(i, j)]) / g.hx;
  for (int j = 0; j + 1 < g.my; ++j)
    for (int i = 0; i < g.mx; ++i)
      out[g.ey_edge(i, j)] = (chi[g.node(i, j + 1)] - chi[g.node(i, j)]) / g.hy;
  return out;
}

/// Adjoint of grad_full: <A, grad_full(chi)>_edges = <grad_adjoint(A), chi>_nodes.
/// This is the negative discrete divergence with the zero-flux boundary built
/// in; grad_adjoint(A') = 0 encodes both div(A') = 0 and A'. n = 0.
inline std::vector<double> grad_adjoint(const StaggeredGrid& g, const VectorField& A) {
  check_size(A.v.size(), g.n_edges(), "grad_adjoint");
  std::vector<double> out(static_cast<size_t>(g.n_nodes()), 0.0);
  for (int j = 0; j < g.my; ++j)
    for (int i = 0; i + 1 < g.mx; ++i) {
      const double a = A[g.ex_edge(i, j)] / g.hx;
      out[static_cast<size_t>(g.node(i + 1, j))] += a;
      out[static_cast<size_t>(g.node(i, j))] -= a;
    }
  for (int j = 0; j + 1 < g.my; ++j)
    for (int i = 0; i < g.mx; ++i) {
      const double a = A[g.ey_edge(i, j)] / g.hy;
      out[static_cast<size_t>(g.node(i, j + 1))] += a;
      out[static_cast<size_t>(g.node(i, j))] -= a;
    }
  return out;
}

/// Scalar 2D curl on cells: d(Ay)/dx - d(Ax)/dy.
inline std::vector<double> curl2d(const StaggeredGrid& g, const VectorField& A) {
  check_size(A.v.size(), g.n_edges(), "curl2d");
  std::vector<double> out(static_cast<size_t>(g.n_cells()), 0.0);
  for (int j = 0; j + 1 < g.my; ++j)
    for (int i = 0; i + 1 < g.mx; ++i) {
      const double ay = (A[g.ey_edge(i + 1, j)] - A[g.ey_edge(i, j)]) / g.hx;
      const double ax = (A[g.ex_edge(i, j + 1)] - A[g.ex_edge(i, j)]) / g.hy;
      out[static_cast<size_t>(g.cell(i, j))] = ay - ax;
    }
  return out;
}

/// CG for the (singular, consistent) Neumann problem grad' grad chi = rhs
/// with mean-zero normalization of the iterates.
inline std::vector<double> neumann_poisson_solve(const StaggeredGrid& g,
                                                 std::vector<double> rhs, double rtol = 1e-12) {
  const int n = g.n_nodes();
  auto remove_mean = [n](std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    for (double& v : x) v -= m;
  };
  auto apply = [&](const std::vector<double>& x) {
    return grad_adjoint(g, grad_full(g, x));
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  remove_mean(rhs);
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  if (rhs_norm == 0.0) return x;
  std::vector<double> r = rhs, p = rhs;
  double rr = dot(r, r);
  const double target = rtol * rhs_norm;
  const int cap = std::max(200, 20 * n);
  for (int it = 0; it < cap; ++it) {
    std::vector<double> ap = apply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0))
      throw SolverError("neumann_poisson_solve: lost positivity (drift into the nullspace)", std::sqrt(rr));
    const double a = rr / pap;
    for (size_t i = 0; i < x.size(); ++i) x[i] += a * p[i];
    for (size_t i = 0; i < r.size(); ++i) r[i] -= a * ap[i];
    remove_mean(x);
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= target) return x;
    const double b = rr_new / rr;
    for (size_t i = 0; i < p.size(); ++i) p[i] = r[i] + b * p[i];
    rr = rr_new;
  }
  throw SolverError("neumann_poisson_solve: no convergence", std::sqrt(rr));
}

}  // namespace stagger

/// Coulomb-gauge representative: A' = A + grad(chi) with chi solving the
/// discrete Neumann problem, so grad_adjoint(A') ~ 0 (div-free, zero normal
/// trace) while curl(A') = curl(A) exactly.
inline VectorField coulomb_project(const StaggeredGrid& g, const VectorField& A,
                                   double rtol = 1e-12) {
  std::vector<double> rhs = stagger::grad_adjoint(g, A);
  for (double& v : rhs) v = -v;
  const std::vector<double> chi = stagger::neumann_poisson_solve(g, std::move(rhs), rtol);
  const VectorField gchi = stagger::grad_full(g, chi);
  VectorField out = A;
  for (int e = 0; e < g.n_edges(); ++e) out[e] += gchi[e];
  return out;
}

}  // namespace gldual
