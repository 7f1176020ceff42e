#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace regcomply {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

// min c^T x  s.t.  A x = b, x >= 0.
// Dense two-phase tableau simplex with Bland's rule (no cycling).
inline LpResult solve_lp(const Matrix& A, const std::vector<double>& b, const std::vector<double>& c,
                         double eps = 1e-9) {
  const std::size_t m = A.rows, n = A.cols;
  require(b.size() == m && c.size() == n, "solve_lp: dimension mismatch");

  // Columns: n structural, m artificial, then rhs.
  const std::size_t width = n + m + 1, rhs = n + m;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  double bscale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sgn = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sgn * A(i, j);
    t[i][n + i] = 1.0;
    t[i][rhs] = sgn * b[i];
    basis[i] = n + i;
    bscale = std::max(bscale, std::abs(b[i]));
  }
  std::vector<char> active(m, 1);
  auto& z = t[m];

  auto pivot = [&](std::size_t r, std::size_t col) {
    const double p = t[r][col];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || t[i][col] == 0.0) continue;
      const double f = t[i][col];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  };

  // Returns false when unbounded.
  auto run = [&](std::size_t allowed) {
    for (std::size_t iter = 0;; ++iter) {
      if (iter > 100000) throw NumericError("solve_lp: iteration cap reached");
      std::size_t enter = width;
      for (std::size_t j = 0; j < allowed; ++j)
        if (z[j] < -eps) {
          enter = j;
          break;
        }
      if (enter == width) return true;
      std::size_t leave = m;
      double best = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (!active[i] || t[i][enter] <= eps) continue;
        const double ratio = t[i][rhs] / t[i][enter];
        if (leave == m || ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  };

  // Phase 1: minimize the sum of artificials.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < width; ++j)
      if (j < n || j == rhs) z[j] -= t[i][j];
  run(n + m);
  LpResult res;
  if (-z[rhs] > eps * bscale) {
    res.status = LpResult::Status::infeasible;
    return res;
  }
  // Drive zero-level artificials out; rows with no structural pivot are redundant.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(t[i][j]) > eps) {
        col = j;
        break;
      }
    if (col < n)
      pivot(i, col);
    else
      active[i] = 0;
  }

  // Phase 2 objective row.
  std::fill(z.begin(), z.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) z[j] = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    if (!active[i]) continue;
    const double cb = c[basis[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < width; ++j) z[j] -= cb * t[i][j];
  }
  if (!run(n)) {
    res.status = LpResult::Status::unbounded;
    return res;
  }
  res.status = LpResult::Status::optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (active[i] && basis[i] < n) res.x[basis[i]] = std::max(0.0, t[i][rhs]);
  res.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
  return res;
}

}  // namespace regcomply
