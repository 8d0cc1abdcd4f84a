#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aderdg {

// Pivot fell below the singularity threshold (64*eps*column magnitude).
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
struct scalar_traits {
  using real_type = S;
  static real_type magnitude(const S& x) {
    using std::abs;
    return abs(x);
  }
};

template <class R>
struct scalar_traits<std::complex<R>> {
  using real_type = R;
  static real_type magnitude(const std::complex<R>& x) { return std::abs(x); }
};

template <class S>
using real_t = typename scalar_traits<S>::real_type;

// Row-major dense matrix over a real or complex scalar.
template <class S>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, S value = S{})
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), value) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("DenseMatrix: negative extent");
  }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  S& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + static_cast<std::size_t>(j)];
  }
  const S& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + static_cast<std::size_t>(j)];
  }

  std::span<S> row(int i) {
    return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const S> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
  }

  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> data_;
};

template <class S>
real_t<S> max_norm(std::span<const S> v) {
  real_t<S> m{};
  for (const S& x : v) m = std::max(m, scalar_traits<S>::magnitude(x));
  return m;
}

template <class S>
real_t<S> max_abs(const DenseMatrix<S>& a) {
  real_t<S> m{};
  for (const S& x : a.data()) m = std::max(m, scalar_traits<S>::magnitude(x));
  return m;
}

template <class S>
std::vector<S> matvec(const DenseMatrix<S>& a, std::span<const S> x) {
  if (a.cols() != static_cast<int>(x.size()))
    throw std::invalid_argument("matvec: size mismatch");
  std::vector<S> y(a.rows(), S{});
  for (int i = 0; i < a.rows(); ++i) {
    S acc{};
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

template <class S>
DenseMatrix<S> matmul(const DenseMatrix<S>& a, const DenseMatrix<S>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: size mismatch");
  DenseMatrix<S> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const S aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// LU factorization with partial pivoting, PA = LU packed into one matrix.
template <class S>
struct LuFactorization {
  DenseMatrix<S> lu;
  std::vector<int> perm;  // row i of LU came from row perm[i] of A
  int sign = 1;
};

template <class S>
LuFactorization<S> lu_factor(DenseMatrix<S> a) {
  using R = real_t<S>;
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("lu_factor: matrix not square");
  const R eps = std::numeric_limits<R>::epsilon();

  std::vector<R> col_scale(n, R{});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      col_scale[j] = std::max(col_scale[j], scalar_traits<S>::magnitude(a(i, j)));

  LuFactorization<S> f;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    R piv_mag = scalar_traits<S>::magnitude(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const R m = scalar_traits<S>::magnitude(a(i, k));
      if (m > piv_mag) {
        piv_mag = m;
        piv = i;
      }
    }
    if (piv_mag < R(64) * eps * col_scale[k] || piv_mag == R{})
      throw SingularMatrixError("lu_factor: singular to working precision at column " +
                                std::to_string(k));
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    const S pivot = a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const S l = a(i, k) / pivot;
      a(i, k) = l;
      for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

template <class S>
std::vector<S> lu_solve(const LuFactorization<S>& f, std::span<const S> b) {
  const int n = f.lu.rows();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve: size mismatch");
  std::vector<S> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 1; i < n; ++i) {
    S acc = x[i];
    for (int j = 0; j < i; ++j) acc -= f.lu(i, j) * x[j];
    x[i] = acc;
  }
  for (int i = n - 1; i >= 0; --i) {
    S acc = x[i];
    for (int j = i + 1; j < n; ++j) acc -= f.lu(i, j) * x[j];
    x[i] = acc / f.lu(i, i);
  }
  return x;
}

template <class S>
std::vector<S> lu_solve(const DenseMatrix<S>& a, std::span<const S> b) {
  return lu_solve(lu_factor(a), b);
}

template <class S>
DenseMatrix<S> mat_inverse(const DenseMatrix<S>& a) {
  const int n = a.rows();
  const auto f = lu_factor(a);
  DenseMatrix<S> inv(n, n);
  std::vector<S> e(n, S{});
  for (int j = 0; j < n; ++j) {
    e[j] = S(1);
    const auto col = lu_solve(f, std::span<const S>(e));
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = S{};
  }
  return inv;
}

// Determinant via elimination; returns 0 for exactly singular input instead of throwing.
template <class S>
S determinant(DenseMatrix<S> a) {
  using R = real_t<S>;
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  S det = S(1);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    R piv_mag = scalar_traits<S>::magnitude(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const R m = scalar_traits<S>::magnitude(a(i, k));
      if (m > piv_mag) {
        piv_mag = m;
        piv = i;
      }
    }
    if (piv_mag == R{}) return S{};
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    const S pivot = a(k, k);
    det *= pivot;
    for (int i = k + 1; i < n; ++i) {
      const S l = a(i, k) / pivot;
      for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return det;
}

}  // namespace aderdg
