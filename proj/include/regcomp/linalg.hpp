#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace regcomply {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double v = 0.0) : rows(r), cols(c), a(r * c, v) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

inline Matrix matmul(const Matrix& x, const Matrix& y) {
  require(x.cols == y.rows, "matmul: inner dimensions differ");
  Matrix r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t l = 0; l < x.cols; ++l) {
      const double v = x(i, l);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += v * y(l, j);
    }
  return r;
}

inline double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

// Sum of values after sorting by decreasing magnitude. The result depends only
// on the multiset of values, which keeps permuted inputs bit-identical.
inline double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

struct EigenDecomposition {
  std::vector<double> values;  // decreasing |value|
  Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi. Sweeps until the off-diagonal Frobenius mass is at most
// tol * ||z||_F.
inline EigenDecomposition eig_sym(const Matrix& z, double tol = 1e-12) {
  require(z.rows == z.cols, "eig_sym: matrix is not square");
  require(tol > 0.0, "eig_sym: tol must be positive");
  const std::size_t n = z.rows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(z(i, j) - z(j, i)) <= 1e-12 * (1.0 + std::abs(z(i, j))),
              "eig_sym: matrix is not symmetric");

  Matrix a = z;
  Matrix v = Matrix::identity(n);
  const double scale = frobenius(z);
  auto off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (off() > tol * scale) {
    if (++sweep > kMaxSweeps) throw NumericError("eig_sym: Jacobi did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(a(i, i)) > std::abs(a(j, j)); });
  EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

// U diag(values) U^T with U = e.vectors.
inline Matrix reconstruct(const Matrix& u, const std::vector<double>& values) {
  const std::size_t n = u.rows;
  Matrix r(n, n);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) r(i, l) += values[j] * u(i, j) * u(l, j);
  }
  return r;
}

// Extreme eigenvalues of a symmetric matrix.
inline std::pair<double, double> eig_extremes(const Matrix& z) {
  const auto e = eig_sym(z);
  const auto [lo, hi] = std::minmax_element(e.values.begin(), e.values.end());
  return {*lo, *hi};
}

// Singular values of a (one per column, unsorted) by one-sided Jacobi. Works
// on the columns directly, so small singular values keep their relative
// accuracy instead of being squared away in a Gram matrix.
inline std::vector<double> singular_values(Matrix a, double tol = 1e-15) {
  const std::size_t m = a.rows, n = a.cols;
  double scale = 0.0;
  for (double v : a.a) scale += v * v;
  // Columns below this squared norm are numerically zero.
  const double negligible = 1e-30 * scale;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        if (alpha <= negligible || beta <= negligible) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = a(i, p), y = a(i, q);
          a(i, p) = c * x - s * y;
          a(i, q) = s * x + c * y;
        }
      }
    if (!rotated) {
      std::vector<double> out(n);
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += a(i, j) * a(i, j);
        out[j] = std::sqrt(s);
      }
      return out;
    }
  }
  throw NumericError("singular_values: one-sided Jacobi did not converge");
}

}  // namespace regcomply
