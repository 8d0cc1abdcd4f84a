#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aderdg/linalg.hpp"

namespace aderdg {

/// First-order IVP: du/dt = F(u, t), u(t0) = u0, on [t0, t_end].
/// The Jacobian dF/du is optional; when absent, Newton falls back to
/// forward differences. An exact solution, when known, enables the error
/// and convergence machinery.
template <class S>
struct OdeProblem {
  using RhsFn = std::function<void(std::span<const S>, S, std::span<S>)>;
  using JacFn = std::function<void(std::span<const S>, S, DenseMatrix<S>&)>;
  using ExactFn = std::function<void(S, std::span<S>)>;

  int dim = 1;
  RhsFn rhs;
  JacFn jacobian;  // empty -> finite-difference fallback
  std::vector<S> u0;
  S t0{};
  S t_end{};
  ExactFn exact;  // empty when no closed form is available

  bool has_jacobian() const { return static_cast<bool>(jacobian); }
  bool has_exact() const { return static_cast<bool>(exact); }

  std::vector<S> exact_at(S t) const {
    std::vector<S> u(dim);
    exact(t, std::span<S>(u));
    return u;
  }
};

/// Ordered node sequence t_0 < ... < t_L. Uniform or piecewise graded.
template <class S>
struct TimeMesh {
  std::vector<S> nodes;

  int num_elements() const { return static_cast<int>(nodes.size()) - 1; }
  S front() const { return nodes.front(); }
  S back() const { return nodes.back(); }
  S dt(int n) const { return nodes[n + 1] - nodes[n]; }
};

template <class S>
void validate_mesh(const TimeMesh<S>& mesh) {
  using std::isfinite;
  if (mesh.nodes.size() < 2) throw std::invalid_argument("TimeMesh: need at least 2 nodes");
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (!isfinite(mesh.nodes[i])) throw std::invalid_argument("TimeMesh: non-finite node");
    if (i > 0 && !(mesh.nodes[i] > mesh.nodes[i - 1]))
      throw std::invalid_argument("TimeMesh: nodes not strictly increasing at index " +
                                  std::to_string(i));
  }
}

/// Uniform mesh with `cells` elements over [a, b].
template <class S>
TimeMesh<S> uniform_mesh(S a, S b, int cells) {
  if (cells < 1) throw std::invalid_argument("uniform_mesh: need at least one cell");
  if (!(b > a)) throw std::invalid_argument("uniform_mesh: empty interval");
  TimeMesh<S> mesh;
  mesh.nodes.resize(cells + 1);
  for (int i = 0; i <= cells; ++i)
    mesh.nodes[i] = a + (b - a) * S(i) / S(cells);
  mesh.nodes.front() = a;
  mesh.nodes.back() = b;
  validate_mesh(mesh);
  return mesh;
}

template <class S>
struct MeshSegment {
  int cells = 0;
  S a{};
  S b{};
};

/// Piecewise-uniform mesh from contiguous segments.
template <class S>
TimeMesh<S> graded_mesh(const std::vector<MeshSegment<S>>& segments) {
  if (segments.empty()) throw std::invalid_argument("graded_mesh: no segments");
  TimeMesh<S> mesh;
  mesh.nodes.push_back(segments.front().a);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    if (seg.cells < 1) throw std::invalid_argument("graded_mesh: segment needs at least one cell");
    if (!(seg.b > seg.a)) throw std::invalid_argument("graded_mesh: empty segment");
    if (seg.a != mesh.nodes.back())
      throw std::invalid_argument("graded_mesh: segments not contiguous");
    for (int i = 1; i <= seg.cells; ++i)
      mesh.nodes.push_back(seg.a + (seg.b - seg.a) * S(i) / S(seg.cells));
    mesh.nodes.back() = seg.b;
  }
  validate_mesh(mesh);
  return mesh;
}

}  // namespace aderdg
