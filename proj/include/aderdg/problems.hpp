#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aderdg/ode.hpp"

namespace aderdg {

class RegistryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Principal-branch Lambert W in log-argument form: solves w + ln w = y for
/// w > 0 given y = ln x. Working with y instead of x = w e^w avoids
/// materializing e^y, which overflows for the stiff-flame arguments.
/// Newton on g(w) = w + ln w - y with the guesses below; for very negative y
/// the solution is e^(y - e^y) to far better than the residual target.
template <class S>
S lambert_w_principal(S y) {
  using std::abs;
  using std::exp;
  using std::log;
  const S eps = std::numeric_limits<S>::epsilon();
  if (y <= S(-30)) return exp(y - exp(y));

  S w = y > S(2) ? y - log(std::max(y, S(2))) : exp(y) / (S(1) + exp(y));
  for (int iter = 0; iter < 50; ++iter) {
    const S g = w + log(w) - y;
    const S dw = g * w / (w + S(1));
    S w_next = w - dw;
    if (w_next <= S(0)) w_next = w / S(2);
    const bool settled = abs(w_next - w) <= S(4) * eps * w;
    w = w_next;
    if (settled) break;
  }
  return w;
}

/// Exact solution of the flame problem, u = 1/(W(a e^(a-t)) + 1) with
/// a = 1/delta - 1, evaluated through the log-argument form y = ln a + a - t.
template <class S>
S flame_exact(S t, S delta) {
  using std::log;
  if (!(delta > S(0)) || !(delta < S(1)))
    throw std::invalid_argument("flame_exact: delta must lie in (0,1)");
  if (!(t >= S(0))) throw std::invalid_argument("flame_exact: t must be nonnegative");
  const S a = S(1) / delta - S(1);
  const S y = log(a) + (a - t);
  return S(1) / (lambert_w_principal(y) + S(1));
}

/// A registered test problem: the ODE system, the mesh ladder it is studied
/// on, and provenance notes where the sources disagree.
template <class S>
struct ProblemSpec {
  std::string name;
  OdeProblem<S> problem;
  std::vector<TimeMesh<S>> default_meshes;
  std::string notes;
};

struct ProblemInfo {
  std::string name;
  int dim = 0;
  double t0 = 0;
  double t_end = 0;
  std::string params;
};

inline std::vector<ProblemInfo> list_problems() {
  return {
      {"harm_osc", 2, 0, 2 * std::numbers::pi, ""},
      {"exp_diss", 2, 0, 2 * std::numbers::pi, ""},
      {"bratu", 2, 0, 1, ""},
      {"third1", 3, 0, 1, ""},
      {"third2", 3, 0, 1, ""},
      {"third3", 3, 1, 2, ""},
      {"flame", 1, 0, 20000, "delta (default 1e-4); domain is [0, 2/delta]"},
  };
}

using ProblemParams = std::map<std::string, double>;

namespace detail {

template <class S>
std::vector<TimeMesh<S>> ladder(S a, S b, std::initializer_list<int> node_counts) {
  std::vector<TimeMesh<S>> meshes;
  for (int nodes : node_counts) meshes.push_back(uniform_mesh<S>(a, b, nodes - 1));
  return meshes;
}

}  // namespace detail

template <class S>
ProblemSpec<S> get_problem(const std::string& name, const ProblemParams& params = {}) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  const S pi = std::numbers::pi_v<S>;
  ProblemSpec<S> spec;
  spec.name = name;
  OdeProblem<S>& p = spec.problem;

  if (name == "harm_osc") {
    // x'' + x = 0, x(0) = 1, x'(0) = 0
    p.dim = 2;
    p.u0 = {S(1), S(0)};
    p.t0 = S(0);
    p.t_end = S(2) * pi;
    p.rhs = [](std::span<const S> u, S, std::span<S> f) {
      f[0] = u[1];
      f[1] = -u[0];
    };
    p.jacobian = [](std::span<const S>, S, DenseMatrix<S>& j) {
      j(0, 0) = S(0); j(0, 1) = S(1);
      j(1, 0) = S(-1); j(1, 1) = S(0);
    };
    p.exact = [](S t, std::span<S> u) {
      u[0] = cos(t);
      u[1] = -sin(t);
    };
    spec.default_meshes = detail::ladder<S>(p.t0, p.t_end, {6, 11, 16, 21, 26, 31});
  } else if (name == "exp_diss") {
    // x'' - x = 0, x(0) = 0, x'(0) = 1
    p.dim = 2;
    p.u0 = {S(0), S(1)};
    p.t0 = S(0);
    p.t_end = S(2) * pi;
    p.rhs = [](std::span<const S> u, S, std::span<S> f) {
      f[0] = u[1];
      f[1] = u[0];
    };
    p.jacobian = [](std::span<const S>, S, DenseMatrix<S>& j) {
      j(0, 0) = S(0); j(0, 1) = S(1);
      j(1, 0) = S(1); j(1, 1) = S(0);
    };
    p.exact = [](S t, std::span<S> u) {
      using std::cosh;
      using std::sinh;
      u[0] = sinh(t);
      u[1] = cosh(t);
    };
    spec.default_meshes = detail::ladder<S>(p.t0, p.t_end, {6, 11, 16, 21, 26, 31});
  } else if (name == "bratu") {
    // x'' = 2 exp(x), x(0) = x'(0) = 0
    p.dim = 2;
    p.u0 = {S(0), S(0)};
    p.t0 = S(0);
    p.t_end = S(1);
    p.rhs = [](std::span<const S> u, S, std::span<S> f) {
      f[0] = u[1];
      f[1] = S(2) * exp(u[0]);
    };
    p.jacobian = [](std::span<const S> u, S, DenseMatrix<S>& j) {
      j(0, 0) = S(0); j(0, 1) = S(1);
      j(1, 0) = S(2) * exp(u[0]); j(1, 1) = S(0);
    };
    p.exact = [](S t, std::span<S> u) {
      u[0] = S(-2) * log(cos(t));
      u[1] = S(2) * sin(t) / cos(t);
    };
    spec.default_meshes = detail::ladder<S>(p.t0, p.t_end, {31, 41, 51, 61, 71, 81});
  } else if (name == "third1") {
    // x''' = 2x'' + 3x' - 10x + (34t - 16)e^(-2t) - 10t^2 + 6t + 34,
    // closed form x = t^2 e^(-2t) - t^2 + 3
    p.dim = 3;
    p.u0 = {S(3), S(0), S(0)};
    p.t0 = S(0);
    p.t_end = S(1);
    p.rhs = [](std::span<const S> u, S t, std::span<S> f) {
      f[0] = u[1];
      f[1] = u[2];
      f[2] = S(2) * u[2] + S(3) * u[1] - S(10) * u[0] + (S(34) * t - S(16)) * exp(S(-2) * t) -
             S(10) * t * t + S(6) * t + S(34);
    };
    p.jacobian = [](std::span<const S>, S, DenseMatrix<S>& j) {
      j(0, 0) = S(0); j(0, 1) = S(1); j(0, 2) = S(0);
      j(1, 0) = S(0); j(1, 1) = S(0); j(1, 2) = S(1);
      j(2, 0) = S(-10); j(2, 1) = S(3); j(2, 2) = S(2);
    };
    p.exact = [](S t, std::span<S> u) {
      const S e = exp(S(-2) * t);
      u[0] = t * t * e - t * t + S(3);
      u[1] = S(2) * t * ((S(1) - t) * e - S(1));
      u[2] = S(2) * ((S(1) - S(4) * t + S(2) * t * t) * e - S(1));
    };
    spec.notes =
        "initial value u1(0) = 3 follows the closed-form solution; the system statement also "
        "circulates with u1(0) = 1, which contradicts that solution and is not used here";
    spec.default_meshes = detail::ladder<S>(p.t0, p.t_end, {16, 21, 26, 31, 36, 41});
  } else if (name == "third2") {
    // x''' = 4/(1+t)^3 - 2 exp(-3x), closed form x = ln(1+t)
    p.dim = 3;
    p.u0 = {S(0), S(1), S(-1)};
    p.t0 = S(0);
    p.t_end = S(1);
    p.rhs = [](std::span<const S> u, S t, std::span<S> f) {
      const S s = S(1) + t;
      f[0] = u[1];
      f[1] = u[2];
      f[2] = S(4) / (s * s * s) - S(2) * exp(S(-3) * u[0]);
    };
    p.jacobian = [](std::span<const S> u, S, DenseMatrix<S>& j) {
      j(0, 0) = S(0); j(0, 1) = S(1); j(0, 2) = S(0);
      j(1, 0) = S(0); j(1, 1) = S(0); j(1, 2) = S(1);
      j(2, 0) = S(6) * exp(S(-3) * u[0]); j(2, 1) = S(0); j(2, 2) = S(0);
    };
    p.exact = [](S t, std::span<S> u) {
      const S s = S(1) + t;
      u[0] = log(s);
      u[1] = S(1) / s;
      u[2] = S(-1) / (s * s);
    };
    spec.default_meshes = detail::ladder<S>(p.t0, p.t_end, {16, 21, 26, 31, 36, 41});
  } else if (name == "third3") {
    // x''' = x x'' - (2/t) x' + 16 pi^2 x^2 + (8 pi/t - 64 pi^3) cos(4 pi t),
    // closed form x = sin(4 pi t) on [1, 2]
    p.dim = 3;
    p.u0 = {S(0), S(4) * pi, S(0)};
    p.t0 = S(1);
    p.t_end = S(2);
    p.rhs = [pi](std::span<const S> u, S t, std::span<S> f) {
      f[0] = u[1];
      f[1] = u[2];
      f[2] = u[0] * u[2] - S(2) / t * u[1] + S(16) * pi * pi * u[0] * u[0] +
             (S(8) * pi / t - S(64) * pi * pi * pi) * cos(S(4) * pi * t);
    };
    p.jacobian = [pi](std::span<const S> u, S t, DenseMatrix<S>& j) {
      j(0, 0) = S(0); j(0, 1) = S(1); j(0, 2) = S(0);
      j(1, 0) = S(0); j(1, 1) = S(0); j(1, 2) = S(1);
      j(2, 0) = u[2] + S(32) * pi * pi * u[0];
      j(2, 1) = S(-2) / t;
      j(2, 2) = u[0];
    };
    p.exact = [pi](S t, std::span<S> u) {
      u[0] = sin(S(4) * pi * t);
      u[1] = S(4) * pi * cos(S(4) * pi * t);
      u[2] = S(-16) * pi * pi * sin(S(4) * pi * t);
    };
    spec.notes = "initial data are given at the left end of the domain, t0 = 1";
    spec.default_meshes = detail::ladder<S>(p.t0, p.t_end, {16, 21, 26, 31, 36, 41});
  } else if (name == "flame") {
    // u' = u^2 - u^3, u(0) = delta, on [0, 2/delta]; stiff near t = 1/delta
    S delta = S(1e-4);
    if (auto it = params.find("delta"); it != params.end()) delta = S(it->second);
    if (!(delta > S(0))) throw std::invalid_argument("flame: delta must be positive");
    if (!(delta < S(1))) throw std::invalid_argument("flame: delta must be less than 1");
    p.dim = 1;
    p.u0 = {delta};
    p.t0 = S(0);
    p.t_end = S(2) / delta;
    p.rhs = [](std::span<const S> u, S, std::span<S> f) { f[0] = u[0] * u[0] - u[0] * u[0] * u[0]; };
    p.jacobian = [](std::span<const S> u, S, DenseMatrix<S>& j) {
      j(0, 0) = S(2) * u[0] - S(3) * u[0] * u[0];
    };
    p.exact = [delta](S t, std::span<S> u) { u[0] = flame_exact(t, delta); };
    // graded mesh with the refined band bracketing the ignition transition
    // at t = 1/delta + ln(1/delta); band edges are fractions of the domain
    // length T = 2/delta
    const S domain = S(2) / delta;
    std::vector<MeshSegment<S>> segments;
    if (delta <= S(2e-5)) {
      segments = {{80, S(0), S(0.495) * domain},
                  {2000, S(0.495) * domain, S(0.505) * domain},
                  {80, S(0.505) * domain, domain}};
    } else {
      segments = {{20, S(0), S(0.4) * domain},
                  {2000, S(0.4) * domain, S(0.6) * domain},
                  {20, S(0.6) * domain, domain}};
    }
    spec.default_meshes = {graded_mesh(segments)};
  } else {
    throw RegistryError("unknown problem '" + name +
                        "'; known: harm_osc, exp_diss, bratu, third1, third2, third3, flame");
  }
  return spec;
}

}  // namespace aderdg
