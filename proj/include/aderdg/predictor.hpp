#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "aderdg/linalg.hpp"
#include "aderdg/ode.hpp"
#include "aderdg/scheme_tables.hpp"

namespace aderdg {

/// The right side returned a non-finite value while solving an element.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& msg, int node_index)
      : std::runtime_error(msg), node_index(node_index) {}
  int node_index = -1;
};

enum class SolverKind { picard, newton, automatic };

template <class S>
struct IntegratorOptions {
  int degree = 3;
  SolverKind solver = SolverKind::automatic;
  S tol = S(1e-13);
  int picard_max_iter = 100;
  int newton_max_iter = 50;
  bool cache_rhs = true;
};

template <class S>
struct SolveStats {
  int iterations = 0;
  S residual_norm{};
  std::int64_t rhs_evals = 0;
  std::int64_t jac_evals = 0;
  bool converged = false;

  void accumulate(const SolveStats& other) {
    iterations += other.iterations;
    rhs_evals += other.rhs_evals;
    jac_evals += other.jac_evals;
    residual_norm = std::max(residual_norm, other.residual_norm);
  }
};

/// Predictor coefficients q_hat for one element: row p holds the K-vector
/// coefficient at node p. When caching is on, cached_rhs carries the F values
/// used to build the returned coefficients so the corrector can reuse them.
template <class S>
struct ElementCoefficients {
  DenseMatrix<S> coeffs;  // (N+1) x K
  int element_index = 0;
  S t_left{};
  S dt{};
  DenseMatrix<S> cached_rhs;  // (N+1) x K, empty when caching is disabled
};

template <class S>
struct PredictorResult {
  ElementCoefficients<S> element;
  SolveStats<S> stats;
};

/// Constant initial iterate q_hat_p = u_n.
template <class S>
ElementCoefficients<S> initial_guess(std::type_identity_t<std::span<const S>> u_n, int degree) {
  ElementCoefficients<S> el;
  el.coeffs = DenseMatrix<S>(degree + 1, static_cast<int>(u_n.size()));
  for (int p = 0; p <= degree; ++p)
    for (int k = 0; k < el.coeffs.cols(); ++k) el.coeffs(p, k) = u_n[k];
  return el;
}

namespace detail {

// F at every node of the element, one call per node, counted in stats.
template <class S>
void eval_rhs_at_nodes(const SchemeTables<S>& tables, const OdeProblem<S>& problem,
                       const DenseMatrix<S>& coeffs, S t_left, S dt, DenseMatrix<S>& fhat,
                       SolveStats<S>& stats) {
  using std::isfinite;
  const int n = tables.degree + 1;
  for (int q = 0; q < n; ++q) {
    const S t_q = t_left + dt * tables.nodes[q];
    problem.rhs(coeffs.row(q), t_q, fhat.row(q));
    ++stats.rhs_evals;
    for (int k = 0; k < problem.dim; ++k) {
      if (!isfinite(fhat(q, k)))
        throw EvaluationError("non-finite RHS value at node " + std::to_string(q) + ", t = " +
                                  std::to_string(static_cast<double>(t_q)),
                              q);
    }
  }
}

template <class S>
void fd_jacobian(const OdeProblem<S>& problem, std::type_identity_t<std::span<const S>> u, S t,
                 std::type_identity_t<std::span<const S>> f_base, DenseMatrix<S>& jac, SolveStats<S>& stats) {
  using std::abs;
  using std::sqrt;
  const S h0 = sqrt(std::numeric_limits<S>::epsilon());
  const int dim = problem.dim;
  std::vector<S> u_pert(u.begin(), u.end());
  std::vector<S> f_pert(dim);
  for (int k = 0; k < dim; ++k) {
    const S h = h0 * std::max(S(1), abs(u[k]));
    u_pert[k] = u[k] + h;
    problem.rhs(u_pert, t, std::span<S>(f_pert));
    ++stats.rhs_evals;
    for (int i = 0; i < dim; ++i) jac(i, k) = (f_pert[i] - f_base[i]) / h;
    u_pert[k] = u[k];
  }
}

}  // namespace detail

/// Max-norm residual of the predictor system for the given coefficients,
/// ||q_hat_p - sum_q B_pq dt F(q_hat_q, t(tau_q)) - u_n||_max over all p.
/// Evaluates F afresh; a pure diagnostic that touches no counters.
template <class S>
S predictor_residual(const SchemeTables<S>& tables, const OdeProblem<S>& problem,
                     const ElementCoefficients<S>& el, std::type_identity_t<std::span<const S>> u_n) {
  using std::abs;
  const int n = tables.degree + 1;
  const int dim = problem.dim;
  DenseMatrix<S> fhat(n, dim);
  std::vector<S> fq(dim);
  for (int q = 0; q < n; ++q) {
    problem.rhs(el.coeffs.row(q), el.t_left + el.dt * tables.nodes[q], std::span<S>(fq));
    for (int k = 0; k < dim; ++k) fhat(q, k) = fq[k];
  }
  S res{};
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < dim; ++k) {
      S acc = el.coeffs(p, k) - u_n[k];
      for (int q = 0; q < n; ++q) acc -= tables.B(p, q) * el.dt * fhat(q, k);
      res = std::max(res, abs(acc));
    }
  return res;
}

/// Picard iteration q^{m+1}_p = u_n + sum_q B_pq dt F(q^m_q, t_q) from the
/// constant initial guess. Convergence metric is the max-norm of the
/// coefficient update. Non-convergence is a reported outcome (converged =
/// false), not a crash; a non-finite RHS raises EvaluationError.
template <class S>
PredictorResult<S> picard_solve(const SchemeTables<S>& tables, const OdeProblem<S>& problem,
                                std::type_identity_t<std::span<const S>> u_n, S t_left, S dt,
                                const IntegratorOptions<S>& opts) {
  using std::abs;
  using std::isfinite;
  if (!(dt > S(0))) throw std::invalid_argument("picard_solve: dt must be positive");
  const int n = tables.degree + 1;
  const int dim = problem.dim;

  PredictorResult<S> r;
  r.element = initial_guess<S>(u_n, tables.degree);
  r.element.t_left = t_left;
  r.element.dt = dt;
  DenseMatrix<S> fhat(n, dim);
  DenseMatrix<S> next(n, dim);
  // iterates past this magnitude are treated as divergence before the next
  // RHS evaluation can overflow
  const S blowup = S(1e100);

  for (int iter = 1; iter <= opts.picard_max_iter; ++iter) {
    detail::eval_rhs_at_nodes(tables, problem, r.element.coeffs, t_left, dt, fhat, r.stats);
    r.stats.iterations = iter;
    S delta{};
    S magnitude{};
    for (int p = 0; p < n; ++p)
      for (int k = 0; k < dim; ++k) {
        S acc = u_n[k];
        for (int q = 0; q < n; ++q) acc += dt * tables.B(p, q) * fhat(q, k);
        delta = std::max(delta, abs(acc - r.element.coeffs(p, k)));
        magnitude = std::max(magnitude, abs(acc));
        next(p, k) = acc;
      }
    r.element.coeffs = next;
    r.stats.residual_norm = delta;
    if (!isfinite(delta) || magnitude > blowup) {
      r.stats.converged = false;
      break;
    }
    if (delta <= opts.tol) {
      r.stats.converged = true;
      break;
    }
  }
  if (opts.cache_rhs) r.element.cached_rhs = fhat;
  return r;
}

/// Newton iteration on the stacked residual G(Q) = Q - dt (B (x) I) F(Q) - 1 (x) u_n.
/// The Newton matrix has blocks delta_pq I - dt B_pq J(q_hat_q, t_q); one
/// Jacobian evaluation per node per iteration. Converged when ||G||_max <= tol.
template <class S>
PredictorResult<S> newton_solve(const SchemeTables<S>& tables, const OdeProblem<S>& problem,
                                std::type_identity_t<std::span<const S>> u_n, S t_left, S dt,
                                const IntegratorOptions<S>& opts) {
  using std::abs;
  using std::isfinite;
  if (!(dt > S(0))) throw std::invalid_argument("newton_solve: dt must be positive");
  const int n = tables.degree + 1;
  const int dim = problem.dim;
  const int total = n * dim;

  PredictorResult<S> r;
  r.element = initial_guess<S>(u_n, tables.degree);
  r.element.t_left = t_left;
  r.element.dt = dt;

  DenseMatrix<S> fhat(n, dim);
  DenseMatrix<S> jac(dim, dim);
  std::vector<S> g(total);
  DenseMatrix<S> newton_matrix(total, total);

  while (true) {
    detail::eval_rhs_at_nodes(tables, problem, r.element.coeffs, t_left, dt, fhat, r.stats);
    S gnorm{};
    for (int p = 0; p < n; ++p)
      for (int k = 0; k < dim; ++k) {
        S acc = r.element.coeffs(p, k) - u_n[k];
        for (int q = 0; q < n; ++q) acc -= dt * tables.B(p, q) * fhat(q, k);
        g[p * dim + k] = acc;
        gnorm = std::max(gnorm, abs(acc));
      }
    r.stats.residual_norm = gnorm;
    if (isfinite(gnorm) && gnorm <= opts.tol) {
      r.stats.converged = true;
      break;
    }
    if (!isfinite(gnorm) || r.stats.iterations >= opts.newton_max_iter) {
      r.stats.converged = false;
      break;
    }

    for (int q = 0; q < n; ++q) {
      const S t_q = t_left + dt * tables.nodes[q];
      if (problem.has_jacobian()) {
        problem.jacobian(r.element.coeffs.row(q), t_q, jac);
      } else {
        detail::fd_jacobian(problem, r.element.coeffs.row(q), t_q, fhat.row(q), jac, r.stats);
      }
      ++r.stats.jac_evals;
      for (int p = 0; p < n; ++p) {
        const S factor = dt * tables.B(p, q);
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l)
            newton_matrix(p * dim + k, q * dim + l) =
                (p == q && k == l ? S(1) : S(0)) - factor * jac(k, l);
      }
    }
    const auto step = lu_solve(newton_matrix, std::span<const S>(g));
    S magnitude{};
    for (int p = 0; p < n; ++p)
      for (int k = 0; k < dim; ++k) {
        r.element.coeffs(p, k) -= step[p * dim + k];
        magnitude = std::max(magnitude, abs(r.element.coeffs(p, k)));
      }
    ++r.stats.iterations;
    if (!isfinite(magnitude) || magnitude > S(1e100)) {
      r.stats.converged = false;
      break;
    }
  }
  if (opts.cache_rhs) r.element.cached_rhs = fhat;
  return r;
}

}  // namespace aderdg
