#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aderdg/linalg.hpp"
#include "aderdg/scheme_tables.hpp"

namespace aderdg {

/// z hit a pole of the stability function (a reciprocal eigenvalue of B).
class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
struct StabilityEvaluation {
  std::complex<S> z;
  std::complex<S> R;
  S abs_R{};
};

/// Stability function in resolvent form, R(z) = 1 + z w^T (E - z B)^{-1} 1.
template <class S>
std::complex<S> stability_R(const SchemeTables<S>& tables, std::complex<S> z) {
  using C = std::complex<S>;
  const int n = tables.degree + 1;
  DenseMatrix<C> a(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      a(p, q) = (p == q ? C(1) : C(0)) - z * C(tables.B(p, q));
  std::vector<C> ones(n, C(1));
  std::vector<C> x;
  try {
    x = lu_solve(a, std::span<const C>(ones));
  } catch (const SingularMatrixError&) {
    throw PoleError("stability function pole: E - zB is singular");
  }
  C acc{};
  for (int p = 0; p < n; ++p) acc += C(tables.weights[p]) * x[p];
  return C(1) + z * acc;
}

/// Same function in determinant form, det(E - zB + z 1 (x) w^T) / det(E - zB).
template <class S>
std::complex<S> stability_R_det(const SchemeTables<S>& tables, std::complex<S> z) {
  using C = std::complex<S>;
  const int n = tables.degree + 1;
  DenseMatrix<C> num(n, n), den(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const C base = (p == q ? C(1) : C(0)) - z * C(tables.B(p, q));
      den(p, q) = base;
      num(p, q) = base + z * C(tables.weights[q]);
    }
  const C den_det = determinant(den);
  if (den_det == C{}) throw PoleError("stability function pole: det(E - zB) = 0");
  return determinant(num) / den_det;
}

template <class S>
StabilityEvaluation<S> evaluate_stability(const SchemeTables<S>& tables, std::complex<S> z) {
  StabilityEvaluation<S> e;
  e.z = z;
  e.R = stability_R(tables, z);
  e.abs_R = std::abs(e.R);
  return e;
}

/// |R| sampled on a rectangular window, with a companion |R| < 1 mask.
/// Pole samples are recorded as +inf rather than failing the raster.
template <class S>
struct StabilityRaster {
  std::vector<S> re;       // size nx
  std::vector<S> im;       // size ny
  DenseMatrix<S> abs_R;    // ny x nx, row i = im[i]
  DenseMatrix<int> stable; // 1 where |R| < 1
};

template <class S>
StabilityRaster<S> raster_region(const SchemeTables<S>& tables, S re_min, S re_max, S im_min,
                                 S im_max, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("raster_region: resolution must be positive");
  StabilityRaster<S> r;
  r.re.resize(nx);
  r.im.resize(ny);
  for (int i = 0; i < nx; ++i)
    r.re[i] = nx == 1 ? re_min : re_min + (re_max - re_min) * S(i) / S(nx - 1);
  for (int j = 0; j < ny; ++j)
    r.im[j] = ny == 1 ? im_min : im_min + (im_max - im_min) * S(j) / S(ny - 1);
  r.abs_R = DenseMatrix<S>(ny, nx);
  r.stable = DenseMatrix<int>(ny, nx);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      S value;
      try {
        value = std::abs(stability_R(tables, std::complex<S>(r.re[i], r.im[j])));
      } catch (const PoleError&) {
        value = std::numeric_limits<S>::infinity();
      }
      r.abs_R(j, i) = value;
      r.stable(j, i) = value < S(1) ? 1 : 0;
    }
  return r;
}

/// |R| along the ray z = r exp(i arg) for each radius; +inf marks poles.
template <class S>
std::vector<S> ray_profile(const SchemeTables<S>& tables, S arg, const std::vector<S>& radii) {
  using std::cos;
  using std::sin;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > S(0))) throw std::invalid_argument("ray_profile: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("ray_profile: radii must be increasing");
  }
  std::vector<S> out(radii.size());
  const S c = cos(arg), s = sin(arg);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    try {
      out[i] = std::abs(stability_R(tables, std::complex<S>(radii[i] * c, radii[i] * s)));
    } catch (const PoleError&) {
      out[i] = std::numeric_limits<S>::infinity();
    }
  }
  return out;
}

}  // namespace aderdg
