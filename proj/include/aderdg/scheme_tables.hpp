#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aderdg/linalg.hpp"

namespace aderdg {

/// All degree-dependent constants of the scheme: Gauss-Legendre nodes and
/// weights on [0,1], the Lagrange nodal basis in barycentric form, and the
/// predictor matrices K, M (diagonal) and B = K^{-1} M.
///
/// Immutable after construction; safe for concurrent read.
template <class S>
struct SchemeTables {
  int degree = 0;              // basis polynomial degree N
  std::vector<S> nodes;        // tau_0..tau_N, strictly increasing in (0,1)
  std::vector<S> weights;      // quadrature weights, sum to 1
  DenseMatrix<S> K;            // K_pq = phi_p(1) phi_q(1) - int phi_p' phi_q
  std::vector<S> M;            // diagonal mass matrix, M_p = w_p
  DenseMatrix<S> B;            // K^{-1} diag(M)
  std::vector<S> phi_at_0;     // phi_p(0)
  std::vector<S> phi_at_1;     // phi_p(1)
  std::vector<S> bary_weights; // barycentric weights (normalized)
};

/// Nodes and weights of the (N+1)-point Gauss-Legendre rule mapped to [0,1].
/// Roots of the degree-(N+1) Legendre polynomial by Newton iteration with
/// Chebyshev-point initial guesses; weights from the derivative formula,
/// halved by the affine map. Symmetry tau_p + tau_{N-p} = 1, w_p = w_{N-p}
/// is exact by construction (only half of the roots are computed).
template <class S>
std::pair<std::vector<S>, std::vector<S>> gauss_legendre_01(int deg) {
  if (deg < 0) throw std::invalid_argument("gauss_legendre_01: negative degree");
  using std::abs;
  using std::cos;
  const int n = deg + 1;
  const S pi = std::numbers::pi_v<S>;
  const S eps = std::numeric_limits<S>::epsilon();

  std::vector<S> nodes(n), weights(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // i-th root counted from +1 on [-1,1]
    S x = cos(pi * (S(i) + S(0.75)) / (S(n) + S(0.5)));
    const bool center = (n % 2 == 1) && (i == half - 1);
    if (center) x = S(0);  // odd-degree Legendre polynomials vanish at 0
    S dp{};
    for (int iter = 0; iter < 100; ++iter) {
      S p0 = S(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        const S pk = (S(2 * k - 1) * x * p1 - S(k - 1) * p0) / S(k);
        p0 = p1;
        p1 = pk;
      }
      dp = S(n) * (x * p1 - p0) / (x * x - S(1));
      if (center) break;
      const S dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= S(4) * eps * abs(x) + eps) {
        // one more derivative evaluation at the settled root
        S q0 = S(1), q1 = x;
        for (int k = 2; k <= n; ++k) {
          const S qk = (S(2 * k - 1) * x * q1 - S(k - 1) * q0) / S(k);
          q0 = q1;
          q1 = qk;
        }
        dp = S(n) * (x * q1 - q0) / (x * x - S(1));
        break;
      }
    }
    const S w = S(1) / ((S(1) - x * x) * dp * dp);  // already halved for [0,1]
    nodes[n - 1 - i] = (S(1) + x) / S(2);
    nodes[i] = (S(1) - x) / S(2);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  S sum{};
  for (const S& w : weights) sum += w;
  for (S& w : weights) w /= sum;
  return {std::move(nodes), std::move(weights)};
}

/// Barycentric weights for Lagrange interpolation on the given nodes,
/// normalized to unit max magnitude (the formulas only use ratios).
template <class S>
std::vector<S> barycentric_weights(const std::vector<S>& nodes) {
  using std::abs;
  const int n = static_cast<int>(nodes.size());
  std::vector<S> bw(n, S(1));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (q != p) bw[p] /= (nodes[p] - nodes[q]);
  S scale{};
  for (const S& b : bw) scale = std::max(scale, abs(b));
  for (S& b : bw) b /= scale;
  return bw;
}

/// Differentiation matrix on the nodes: D(l,q) = phi_q'(tau_l), with the
/// diagonal from the negative-sum trick.
template <class S>
DenseMatrix<S> differentiation_matrix(const std::vector<S>& nodes, const std::vector<S>& bary) {
  const int n = static_cast<int>(nodes.size());
  DenseMatrix<S> d(n, n);
  for (int l = 0; l < n; ++l) {
    S diag{};
    for (int q = 0; q < n; ++q) {
      if (q == l) continue;
      d(l, q) = (bary[q] / bary[l]) / (nodes[l] - nodes[q]);
      diag -= d(l, q);
    }
    d(l, l) = diag;
  }
  return d;
}

/// [phi_0(tau), ..., phi_N(tau)] by barycentric interpolation. Evaluation at
/// a node returns the exact unit vector; evaluation outside [0,1] is allowed.
template <class S>
std::vector<S> basis_eval_all(const SchemeTables<S>& t, S tau) {
  const int n = t.degree + 1;
  std::vector<S> phi(n, S{});
  for (int p = 0; p < n; ++p) {
    if (tau == t.nodes[p]) {
      phi[p] = S(1);
      return phi;
    }
  }
  S denom{};
  for (int p = 0; p < n; ++p) {
    const S term = t.bary_weights[p] / (tau - t.nodes[p]);
    phi[p] = term;
    denom += term;
  }
  for (S& v : phi) v /= denom;
  return phi;
}

/// Basis values at a list of local coordinates, one row per coordinate.
template <class S>
DenseMatrix<S> basis_values_matrix(const SchemeTables<S>& t, const std::vector<S>& taus) {
  DenseMatrix<S> m(static_cast<int>(taus.size()), t.degree + 1);
  for (int i = 0; i < m.rows(); ++i) {
    const auto phi = basis_eval_all(t, taus[i]);
    for (int p = 0; p < m.cols(); ++p) m(i, p) = phi[p];
  }
  return m;
}

/// Assemble all tables for degree N. The integral in K is evaluated by the
/// (N+1)-point rule itself, which is exact for the degree 2N-1 integrand;
/// the mass matrix is diagonal with M_p = w_p for the same reason.
template <class S>
SchemeTables<S> build_tables(int deg) {
  SchemeTables<S> t;
  t.degree = deg;
  auto [nodes, weights] = gauss_legendre_01<S>(deg);
  t.nodes = std::move(nodes);
  t.weights = std::move(weights);
  t.M = t.weights;
  t.bary_weights = barycentric_weights(t.nodes);

  const int n = deg + 1;
  // 0 and 1 are never nodes (Gauss points are interior), so the barycentric
  // formula below has no special cases.
  auto eval_at = [&](S tau) {
    std::vector<S> phi(n);
    S denom{};
    for (int p = 0; p < n; ++p) {
      phi[p] = t.bary_weights[p] / (tau - t.nodes[p]);
      denom += phi[p];
    }
    for (S& v : phi) v /= denom;
    return phi;
  };
  t.phi_at_0 = eval_at(S(0));
  t.phi_at_1 = eval_at(S(1));

  const DenseMatrix<S> d = differentiation_matrix(t.nodes, t.bary_weights);
  t.K = DenseMatrix<S>(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      t.K(p, q) = t.phi_at_1[p] * t.phi_at_1[q] - t.weights[q] * d(q, p);

  DenseMatrix<S> k_inv;
  try {
    k_inv = mat_inverse(t.K);
  } catch (const SingularMatrixError&) {
    throw std::logic_error("build_tables: predictor matrix K is singular (internal failure)");
  }
  t.B = DenseMatrix<S>(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) t.B(p, q) = k_inv(p, q) * t.weights[q];
  return t;
}

}  // namespace aderdg
