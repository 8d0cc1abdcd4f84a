#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "aderdg/linalg.hpp"
#include "aderdg/ode.hpp"
#include "aderdg/predictor.hpp"
#include "aderdg/scheme_tables.hpp"

namespace aderdg {

/// Predictor failed to converge on an element; carries the element index
/// and the time interval it covers.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int element_index, double t_left, double t_right, const std::string& detail)
      : std::runtime_error("predictor diverged on element " + std::to_string(element_index) +
                           " covering [" + std::to_string(t_left) + ", " +
                           std::to_string(t_right) + "]: " + detail),
        element_index(element_index),
        t_left(t_left),
        t_right(t_right) {}
  int element_index = -1;
  double t_left = 0;
  double t_right = 0;
};

/// Node values u_n plus per-element predictor coefficients. Immutable after
/// completion; dense evaluation anywhere in the solved domain is safe for
/// concurrent read.
template <class S>
struct Trajectory {
  SchemeTables<S> tables;
  TimeMesh<S> mesh;
  DenseMatrix<S> node_values;  // (L+1) x K
  std::vector<ElementCoefficients<S>> elements;
  SolveStats<S> stats;

  int degree() const { return tables.degree; }
  int dim() const { return node_values.cols(); }
  int num_elements() const { return static_cast<int>(elements.size()); }
};

/// Corrector step u_{n+1} = u_n + sum_p w_p dt F(q_hat_p, t(tau_p)).
/// Reuses the RHS values cached by the predictor when present.
template <class S>
std::vector<S> advance_node(const SchemeTables<S>& tables, const OdeProblem<S>& problem,
                            std::type_identity_t<std::span<const S>> u_n, const ElementCoefficients<S>& el,
                            SolveStats<S>* stats = nullptr) {
  using std::isfinite;
  const int n = tables.degree + 1;
  const int dim = problem.dim;
  const DenseMatrix<S>* fhat = &el.cached_rhs;
  DenseMatrix<S> fresh;
  if (el.cached_rhs.empty()) {
    fresh = DenseMatrix<S>(n, dim);
    std::vector<S> fq(dim);
    for (int p = 0; p < n; ++p) {
      const S t_p = el.t_left + el.dt * tables.nodes[p];
      problem.rhs(el.coeffs.row(p), t_p, std::span<S>(fq));
      if (stats) ++stats->rhs_evals;
      for (int k = 0; k < dim; ++k) {
        if (!isfinite(fq[k]))
          throw EvaluationError("non-finite RHS value in corrector at node " + std::to_string(p),
                                p);
        fresh(p, k) = fq[k];
      }
    }
    fhat = &fresh;
  }
  std::vector<S> u_next(dim);
  for (int k = 0; k < dim; ++k) {
    S acc = u_n[k];
    for (int p = 0; p < n; ++p) acc += tables.weights[p] * el.dt * (*fhat)(p, k);
    if (!isfinite(acc))
      throw EvaluationError("non-finite node value produced by corrector", -1);
    u_next[k] = acc;
  }
  return u_next;
}

/// March the scheme across the mesh: per element run the predictor (Picard,
/// Newton, or Picard with automatic Newton escalation), apply the corrector,
/// and store the element coefficients.
template <class S>
Trajectory<S> solve_ivp(const OdeProblem<S>& problem, const TimeMesh<S>& mesh,
                        const IntegratorOptions<S>& opts) {
  using std::abs;
  validate_mesh(mesh);
  const S span_scale = std::max(abs(mesh.front()), abs(mesh.back()));
  if (abs(mesh.front() - problem.t0) > S(1e-12) * std::max(S(1), span_scale))
    throw std::invalid_argument("solve_ivp: mesh does not start at the initial time");
  if (mesh.back() > problem.t_end + S(1e-12) * std::max(S(1), span_scale))
    throw std::invalid_argument("solve_ivp: mesh extends past the problem domain");

  Trajectory<S> traj;
  traj.tables = build_tables<S>(opts.degree);
  traj.mesh = mesh;
  const int elements = mesh.num_elements();
  traj.node_values = DenseMatrix<S>(elements + 1, problem.dim);
  for (int k = 0; k < problem.dim; ++k) traj.node_values(0, k) = problem.u0[k];
  traj.elements.reserve(elements);

  for (int n = 0; n < elements; ++n) {
    const S t_left = mesh.nodes[n];
    const S dt = mesh.dt(n);
    const auto u_n = traj.node_values.row(n);

    PredictorResult<S> r;
    switch (opts.solver) {
      case SolverKind::picard:
        r = picard_solve(traj.tables, problem, u_n, t_left, dt, opts);
        break;
      case SolverKind::newton:
        r = newton_solve(traj.tables, problem, u_n, t_left, dt, opts);
        break;
      case SolverKind::automatic: {
        bool picard_failed = false;
        try {
          r = picard_solve(traj.tables, problem, u_n, t_left, dt, opts);
          picard_failed = !r.stats.converged;
        } catch (const EvaluationError&) {
          picard_failed = true;
        }
        if (picard_failed) {
          traj.stats.accumulate(r.stats);
          r = newton_solve(traj.tables, problem, u_n, t_left, dt, opts);
        }
        break;
      }
    }
    if (!r.stats.converged)
      throw DivergenceError(n, static_cast<double>(t_left), static_cast<double>(t_left + dt),
                            "residual " + std::to_string(static_cast<double>(r.stats.residual_norm)) +
                                " after " + std::to_string(r.stats.iterations) + " iterations");
    traj.stats.accumulate(r.stats);
    r.element.element_index = n;

    const auto u_next = advance_node(traj.tables, problem, u_n, r.element, &traj.stats);
    for (int k = 0; k < problem.dim; ++k) traj.node_values(n + 1, k) = u_next[k];
    traj.elements.push_back(std::move(r.element));
  }
  traj.stats.converged = true;
  return traj;
}

/// Index of the element containing t (last element closed on the right).
template <class S>
int locate_element(const TimeMesh<S>& mesh, S t) {
  if (!(t >= mesh.front()) || !(t <= mesh.back()))
    throw std::out_of_range("dense evaluation outside the solved domain");
  const auto it = std::upper_bound(mesh.nodes.begin(), mesh.nodes.end(), t);
  int n = static_cast<int>(it - mesh.nodes.begin()) - 1;
  return std::min(std::max(n, 0), mesh.num_elements() - 1);
}

/// Local solution u_L(t) = sum_p q_hat_{n,p} phi_p((t - t_n)/dt_n).
template <class S>
std::vector<S> dense_eval(const Trajectory<S>& traj, S t) {
  const int n = locate_element(traj.mesh, t);
  const auto& el = traj.elements[n];
  const S tau = (t - el.t_left) / el.dt;
  const auto phi = basis_eval_all(traj.tables, tau);
  std::vector<S> u(traj.dim(), S{});
  for (int p = 0; p <= traj.degree(); ++p)
    for (int k = 0; k < traj.dim(); ++k) u[k] += el.coeffs(p, k) * phi[p];
  return u;
}

/// Tabulated local solution at M sub-nodes per element. Default placement is
/// cell-centered, xi_m = (m+0.5)/M; the endpoint-inclusive mode uses
/// xi_m = m/(M-1) for plotting.
template <class S>
struct SubgridTable {
  std::vector<S> t;       // L*M rows
  DenseMatrix<S> values;  // (L*M) x K
};

template <class S>
std::vector<S> subgrid_coordinates(int subnodes, bool include_endpoints) {
  if (subnodes < 1) throw std::invalid_argument("subgrid: need at least one sub-node");
  std::vector<S> xi(subnodes);
  if (include_endpoints && subnodes > 1) {
    for (int m = 0; m < subnodes; ++m) xi[m] = S(m) / S(subnodes - 1);
  } else {
    for (int m = 0; m < subnodes; ++m) xi[m] = (S(m) + S(0.5)) / S(subnodes);
  }
  return xi;
}

template <class S>
SubgridTable<S> tabulate_subgrid(const Trajectory<S>& traj, int subnodes,
                                 bool include_endpoints = false) {
  const auto xi = subgrid_coordinates<S>(subnodes, include_endpoints);
  const DenseMatrix<S> phi = basis_values_matrix(traj.tables, xi);  // M x (N+1)
  const int elements = traj.num_elements();
  const int dim = traj.dim();
  SubgridTable<S> table;
  table.t.resize(static_cast<std::size_t>(elements) * subnodes);
  table.values = DenseMatrix<S>(elements * subnodes, dim);
  for (int n = 0; n < elements; ++n) {
    const auto& el = traj.elements[n];
    for (int m = 0; m < subnodes; ++m) {
      const int row = n * subnodes + m;
      table.t[row] = el.t_left + el.dt * xi[m];
      for (int k = 0; k < dim; ++k) {
        S acc{};
        for (int p = 0; p <= traj.degree(); ++p) acc += phi(m, p) * el.coeffs(p, k);
        table.values(row, k) = acc;
      }
    }
  }
  return table;
}

/// Largest |q_n(1) - u_{n+1}| over all elements and components. The local
/// solution is discontinuous at nodes; the jump is a refinement diagnostic,
/// not an error to assert away.
template <class S>
S max_interelement_jump(const Trajectory<S>& traj) {
  using std::abs;
  S jump{};
  for (int n = 0; n < traj.num_elements(); ++n) {
    const auto& el = traj.elements[n];
    for (int k = 0; k < traj.dim(); ++k) {
      S end_value{};
      for (int p = 0; p <= traj.degree(); ++p) end_value += el.coeffs(p, k) * traj.tables.phi_at_1[p];
      jump = std::max(jump, abs(end_value - traj.node_values(n + 1, k)));
    }
  }
  return jump;
}

}  // namespace aderdg
