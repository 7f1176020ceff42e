#pragma once

// Brute-force reference computations. They share no code path with the
// closed forms they are used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "compliance.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "regularizers.hpp"

namespace regcomply::oracle {

struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
};

// ||z||_Sigma for Sigma_k as min sum_S ||v_S||_2 s.t. sum_S v_S = z with
// supp(v_S) in S, over every support S of size k. Solved by sharing ADMM and
// certified by a bracket: a feasible decomposition from above, a dual vector
// y scaled to ||y||_(k) = 1 (top-k Euclidean) from below.
inline NormBracket model_norm_admm(const std::vector<double>& z, std::size_t k, double tol = 1e-9,
                                   int max_iter = 400000) {
  const std::size_t n = z.size();
  require(k >= 1 && k <= n, "model_norm_admm: need 1 <= k <= n");
  const double nz = std::sqrt(std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
  if (nz == 0.0) return {0.0, 0.0, 0};

  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  do blocks.push_back(c);
  while (next_combination(c, n));
  const std::size_t N = blocks.size();
  const double dN = static_cast<double>(N);

  std::vector<std::vector<double>> x(N, std::vector<double>(k, 0.0));
  std::vector<double> xbar(n, 0.0), u(n, 0.0), zbar(n);
  for (std::size_t i = 0; i < n; ++i) zbar[i] = z[i] / dN;
  const double rho = dN / nz;

  auto dual_norm = [&](const std::vector<double>& y) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = y[i] * y[i];
    std::sort(sq.begin(), sq.end(), std::greater<>());
    return std::sqrt(std::accumulate(sq.begin(), sq.begin() + static_cast<long>(k), 0.0));
  };

  NormBracket br;
  br.upper = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> nxbar(n, 0.0);
    for (std::size_t b = 0; b < N; ++b) {
      double nv = 0.0;
      std::vector<double> v(k);
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = blocks[b][j];
        v[j] = x[b][j] - xbar[i] + zbar[i] - u[i];
        nv += v[j] * v[j];
      }
      nv = std::sqrt(nv);
      const double shrink = nv > 0.0 ? std::max(0.0, 1.0 - 1.0 / (rho * nv)) : 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        x[b][j] = shrink * v[j];
        nxbar[blocks[b][j]] += x[b][j] / dN;
      }
    }
    xbar = nxbar;
    for (std::size_t i = 0; i < n; ++i) u[i] += xbar[i] - zbar[i];

    if (it % 50 != 0 && it != max_iter) continue;
    // Upper bound: spread the residual over a covering of the coordinates.
    double up = 0.0;
    for (std::size_t b = 0; b < N; ++b) {
      double s = 0.0;
      for (double v : x[b]) s += v * v;
      up += std::sqrt(s);
    }
    for (std::size_t start = 0; start < n; start += k) {
      double s = 0.0;
      for (std::size_t i = start; i < std::min(n, start + k); ++i) {
        const double r = z[i] - dN * xbar[i];
        s += r * r;
      }
      up += std::sqrt(s);
    }
    // Lower bound from the scaled dual variable.
    double lo = 0.0;
    const double dn = dual_norm(u);
    if (dn > 0.0) {
      const double d = std::inner_product(u.begin(), u.end(), z.begin(), 0.0);
      lo = std::abs(d) / dn;
    }
    br.upper = std::min(br.upper, up);
    br.lower = std::max(br.lower, lo);
    br.iterations = it;
    if (br.upper - br.lower <= tol * br.upper) break;
  }
  return br;
}

// z in T_R(Sigma) iff R(x + z) <= R(x) for some x in Sigma (Sigma is a
// symmetric cone, so the step length folds into x). Searches x over every
// model support with entries from `values`.
inline bool cone_membership_grid(const Regularizer& reg, const ModelSet& model, const Point& z,
                                 const std::vector<double>& values) {
  require(model.kind != ModelSet::Kind::low_rank_sym, "grid cone oracle covers vector models");
  const double rz = evaluate(reg, z);
  if (rz == 0.0) return true;
  const std::size_t d = model.ambient_dim();
  std::vector<std::vector<std::size_t>> supports;
  auto add_block = [&](std::size_t n, std::size_t k, std::size_t offset, std::vector<std::vector<std::size_t>> in) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> c(k);
    std::iota(c.begin(), c.end(), 0);
    do
      for (const auto& s : in) {
        auto t = s;
        for (auto i : c) t.push_back(offset + i);
        out.push_back(t);
      }
    while (next_combination(c, n));
    return out;
  };
  supports = add_block(model.n, model.k, 0, {{}});
  if (model.kind == ModelSet::Kind::levels) supports = add_block(model.n2, model.k2, model.n, supports);

  const std::size_t m = values.size();
  for (const auto& s : supports) {
    std::vector<std::size_t> digits(s.size(), 0);
    for (;;) {
      std::vector<double> x(d, 0.0);
      for (std::size_t j = 0; j < s.size(); ++j) x[s[j]] = values[digits[j]];
      const Point px = Point::vector(x);
      const double rx = evaluate(reg, px);
      if (evaluate(reg, px + z) <= rx + 1e-12 * (rx + rz)) return true;
      std::size_t j = 0;
      while (j < digits.size() && ++digits[j] == m) digits[j++] = 0;
      if (j == digits.size()) break;
    }
  }
  return false;
}

// Largest b-measure over every witness -alpha 1_{H0} + 1_{H1} with
// |H0| = k, H1 disjoint and non-empty, alpha = max(|H1|/k, 1).
inline double b_witness_exhaustive(std::size_t k, std::size_t n) {
  require(k >= 1 && 2 * k < n, "b_witness_exhaustive needs k < n/2");
  const ModelSet model = ModelSet::sparse(k, n);
  const Regularizer l1 = Regularizer::l1(n);
  double best = 0.0;
  std::vector<std::size_t> h0(k);
  std::iota(h0.begin(), h0.end(), 0);
  do {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0, j = 0; i < n; ++i) {
      if (j < k && h0[j] == i) {
        ++j;
        continue;
      }
      rest.push_back(i);
    }
    const std::size_t r = rest.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << r); ++mask) {
      const auto h1 = static_cast<std::size_t>(__builtin_popcountll(mask));
      const double alpha = std::max(static_cast<double>(h1) / static_cast<double>(k), 1.0);
      std::vector<double> z(n, 0.0);
      for (auto i : h0) z[i] = -alpha;
      for (std::size_t b = 0; b < r; ++b)
        if (mask >> b & 1) z[rest[b]] = 1.0;
      const Point p = Point::vector(z);
      if (!in_descent_cone(l1, model, p)) throw NumericError("b_witness_exhaustive: witness outside the cone");
      best = std::max(best, b_measure_value(model, p));
    }
  } while (next_combination(h0, n));
  return best;
}

}  // namespace regcomply::oracle
