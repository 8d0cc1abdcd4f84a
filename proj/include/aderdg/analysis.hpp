#pragma once

#include <atomic>
#include <cmath>
#include <future>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "aderdg/integrator.hpp"
#include "aderdg/ode.hpp"

namespace aderdg {

class MissingExactSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global error of one solution in the three classical norms, plus an
/// optional point-wise error table.
template <class S>
struct ErrorReport {
  S l1{};
  S l2{};
  S linf{};
  std::vector<std::pair<S, S>> pointwise;  // (t, eps(t)), filled on request
};

/// Point-wise error eps = max_k |u_k - u_k_exact|.
template <class S>
S pointwise_error(std::span<const S> u, std::span<const S> u_exact) {
  using std::abs;
  if (u.size() != u_exact.size()) throw std::invalid_argument("pointwise_error: size mismatch");
  S e{};
  for (std::size_t k = 0; k < u.size(); ++k) e = std::max(e, abs(u[k] - u_exact[k]));
  return e;
}

/// Global errors of the node solution and the local solution. Node sums are
/// weighted by the element step dt_n; local sums run over the M-per-element
/// subgrid weighted by dt_n/M. The sup norm is the max over the sampled
/// points in both cases.
template <class S>
std::pair<ErrorReport<S>, ErrorReport<S>> global_errors(const Trajectory<S>& traj,
                                                        const OdeProblem<S>& problem, int subnodes,
                                                        bool keep_pointwise = false) {
  if (!problem.has_exact())
    throw MissingExactSolutionError("global_errors: problem has no exact solution");
  if (subnodes < 1) throw std::invalid_argument("global_errors: need at least one sub-node");
  using std::sqrt;
  const int elements = traj.num_elements();
  const int dim = traj.dim();
  std::vector<S> uex(dim);

  ErrorReport<S> node;
  {
    const S eps0 = [&] {
      problem.exact(traj.mesh.nodes[0], std::span<S>(uex));
      return pointwise_error(traj.node_values.row(0), std::span<const S>(uex));
    }();
    node.linf = eps0;
    if (keep_pointwise) node.pointwise.emplace_back(traj.mesh.nodes[0], eps0);
    for (int n = 0; n < elements; ++n) {
      const S t = traj.mesh.nodes[n + 1];
      problem.exact(t, std::span<S>(uex));
      const S eps = pointwise_error(traj.node_values.row(n + 1), std::span<const S>(uex));
      const S dt = traj.mesh.dt(n);
      node.l1 += eps * dt;
      node.l2 += eps * eps * dt;
      node.linf = std::max(node.linf, eps);
      if (keep_pointwise) node.pointwise.emplace_back(t, eps);
    }
    node.l2 = sqrt(node.l2);
  }

  ErrorReport<S> local;
  {
    const auto table = tabulate_subgrid(traj, subnodes);
    for (int n = 0; n < elements; ++n) {
      const S w = traj.mesh.dt(n) / S(subnodes);
      for (int m = 0; m < subnodes; ++m) {
        const int r = n * subnodes + m;
        problem.exact(table.t[r], std::span<S>(uex));
        const S eps = pointwise_error(table.values.row(r), std::span<const S>(uex));
        local.l1 += eps * w;
        local.l2 += eps * eps * w;
        local.linf = std::max(local.linf, eps);
        if (keep_pointwise) local.pointwise.emplace_back(table.t[r], eps);
      }
    }
    local.l2 = sqrt(local.l2);
  }
  return {std::move(node), std::move(local)};
}

/// Least-squares slope of log e versus log dt.
template <class S>
S fit_order(const std::vector<std::pair<S, S>>& points) {
  using std::log;
  if (points.size() < 2) throw FitError("fit_order: need at least 2 points");
  S sx{}, sy{}, sxx{}, sxy{};
  for (const auto& [dt, e] : points) {
    if (!(dt > S(0)) || !(e > S(0))) throw FitError("fit_order: values must be positive");
    const S x = log(dt), y = log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const S n = S(points.size());
  const S denom = n * sxx - sx * sx;
  if (denom == S{}) throw FitError("fit_order: degenerate fit, all steps equal");
  return (n * sxy - sx * sy) / denom;
}

template <class S>
struct OrderTriple {
  S l1{};
  S l2{};
  S linf{};
};

template <class S>
struct ConvergenceRow {
  S dt{};
  ErrorReport<S> node;
  ErrorReport<S> local;
};

template <class S>
struct ConvergenceReport {
  int degree = 0;
  std::vector<ConvergenceRow<S>> rows;
  OrderTriple<S> node_orders;
  OrderTriple<S> local_orders;
  S theoretical_node{};  // 2N+1
  S theoretical_local{}; // N+1
  S noise_floor{};
  SolveStats<S> total_stats;  // accumulated over the whole ladder
};

namespace detail {

template <class S, class Select>
S fit_filtered(const std::vector<ConvergenceRow<S>>& rows, S floor, Select select,
               const char* label) {
  std::vector<std::pair<S, S>> pts;
  for (const auto& row : rows) {
    const S e = select(row);
    if (e >= floor) pts.emplace_back(row.dt, e);
  }
  if (pts.size() < 2)
    throw InsufficientDataError(std::string("convergence fit for ") + label + ": fewer than 2 rows above the noise floor " +
                                std::to_string(static_cast<double>(floor)));
  return fit_order(pts);
}

}  // namespace detail

/// Solve the problem on a ladder of uniform meshes, assemble the error rows,
/// and fit orders over the rows above the noise floor. Mesh-ladder solves are
/// independent and run concurrently, bounded by `jobs`.
template <class S>
ConvergenceReport<S> convergence_study(const OdeProblem<S>& problem, int degree,
                                       const std::vector<TimeMesh<S>>& meshes, int subnodes,
                                       S noise_floor, IntegratorOptions<S> opts = {},
                                       int jobs = 0) {
  using std::abs;
  if (meshes.size() < 2) throw std::invalid_argument("convergence_study: need at least 2 meshes");
  for (const auto& mesh : meshes) {
    validate_mesh(mesh);
    const S dt0 = mesh.dt(0);
    for (int n = 1; n < mesh.num_elements(); ++n)
      if (abs(mesh.dt(n) - dt0) > S(1e-9) * dt0)
        throw std::invalid_argument("convergence_study: meshes must be uniform");
    const S scale = std::max(S(1), std::max(abs(problem.t0), abs(problem.t_end)));
    if (abs(mesh.front() - meshes.front().front()) > S(1e-12) * scale ||
        abs(mesh.back() - meshes.front().back()) > S(1e-12) * scale)
      throw std::invalid_argument("convergence_study: meshes must cover the same domain");
  }
  opts.degree = degree;

  std::vector<ConvergenceRow<S>> rows(meshes.size());
  std::vector<SolveStats<S>> per_mesh_stats(meshes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= meshes.size()) return;
      const auto traj = solve_ivp(problem, meshes[i], opts);
      auto [node, local] = global_errors(traj, problem, subnodes);
      rows[i].dt = meshes[i].dt(0);
      rows[i].node = std::move(node);
      rows[i].local = std::move(local);
      per_mesh_stats[i] = traj.stats;
    }
  };
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(meshes.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(jobs);
    for (int j = 0; j < jobs; ++j) futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();
  }

  ConvergenceReport<S> report;
  report.degree = degree;
  report.rows = std::move(rows);
  report.theoretical_node = S(2 * degree + 1);
  report.theoretical_local = S(degree + 1);
  report.noise_floor = noise_floor;
  for (const auto& s : per_mesh_stats) report.total_stats.accumulate(s);
  report.total_stats.converged = true;
  const auto& r = report.rows;
  report.node_orders.l1 = detail::fit_filtered(r, noise_floor, [](const auto& x) { return x.node.l1; }, "node L1");
  report.node_orders.l2 = detail::fit_filtered(r, noise_floor, [](const auto& x) { return x.node.l2; }, "node L2");
  report.node_orders.linf = detail::fit_filtered(r, noise_floor, [](const auto& x) { return x.node.linf; }, "node Linf");
  report.local_orders.l1 = detail::fit_filtered(r, noise_floor, [](const auto& x) { return x.local.l1; }, "local L1");
  report.local_orders.l2 = detail::fit_filtered(r, noise_floor, [](const auto& x) { return x.local.l2; }, "local L2");
  report.local_orders.linf = detail::fit_filtered(r, noise_floor, [](const auto& x) { return x.local.linf; }, "local Linf");
  return report;
}

}  // namespace aderdg
