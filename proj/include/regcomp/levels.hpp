#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace regcomply {

struct LevelsWeights {
  double w1 = 1.0, w2 = 1.0;
};

// Lower end of the admissible nu_1 interval [a~, 1 - a~].
inline const double kATilde = 2.0 * std::sqrt(3.0) - 3.0;

inline double nu1(const LevelsWeights& w, std::size_t k1, std::size_t k2) {
  require(w.w1 > 0.0 && w.w2 > 0.0, "levels weights must be positive");
  const double r = static_cast<double>(k2) * w.w2 * w.w2 / (static_cast<double>(k1) * w.w1 * w.w1);
  return 1.0 / (1.0 + r);
}

inline double g1(double u, double a) {
  require(a > 0.0 && a <= 1.0 && u >= 0.0, "g1 needs a in (0,1] and u >= 0");
  return u / (a * (u + 1.0) * (u + 1.0) + 1.0);
}

inline double g1_argmax(double a) {
  require(a > 0.0 && a <= 1.0, "g1 needs a in (0,1]");
  return std::sqrt(1.0 + 1.0 / a);
}

inline double g1_max(double a) { return 0.5 * (g1_argmax(a) - 1.0); }

// u/((a/(1-a)) u^2 + 2); the coefficient overflows to +inf at a = 1, giving 0.
inline double g2(double u, double a) {
  require(a >= 0.0 && a <= 1.0 && u >= 0.0, "g2 needs a in [0,1] and u >= 0");
  if (u == 0.0) return 0.0;
  const double c = a >= 1.0 ? std::numeric_limits<double>::infinity() : a / (1.0 - a);
  const double den = c * u * u + 2.0;
  return std::isinf(den) ? 0.0 : u / den;
}

inline double h1(double u, double v, double a) { return std::max(g1(u, a), g1(v, 1.0 - a)); }
inline double h2(double u, double v, double a) { return std::max(g2(u, a), g2(v, 1.0 - a)); }

struct LevelsBound {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
};

inline void check_levels_args(std::size_t k1, std::size_t k2, std::size_t L1, std::size_t L2) {
  require(k1 >= 1 && k2 >= 1, "levels bound needs k_i >= 1");
  require(L1 + L2 > 0, "levels bound needs L1 + L2 > 0");
}

inline LevelsBound b_levels_bound(const LevelsWeights& w, std::size_t k1, std::size_t k2, std::size_t L1,
                                  std::size_t L2) {
  check_levels_args(k1, k2, L1, L2);
  const double n1 = nu1(w, k1, k2);
  const double nu[2] = {n1, 1.0 - n1};
  const double k[2] = {static_cast<double>(k1), static_cast<double>(k2)};
  const double L[2] = {static_cast<double>(L1), static_cast<double>(L2)};
  LevelsBound b;
  b.exact = true;
  for (int i = 0; i < 2; ++i) {
    const double u = L[i] / k[i];
    b.lower = std::max(b.lower, g2(u, nu[i]));
    b.upper = std::max(b.upper, u / (nu[i] * (u + 1.0) * (u + 1.0) + 1.0));
    if (nu[i] < k[i] / (k[i] + L[i])) b.exact = false;
  }
  return b;
}

// sup (L1 b1^2 + L2 b2^2) / sum k_i (a_i^2 + b_i^2) over a_i >= b_i >= 0 with
// sum k_i w_i a_i = sum (k_i + L_i) w_i b_i. The ratio is scale-free, so
// b1 + b2 = 1 and b1 sweeps a regular grid; the inner minimum over a is the
// exact three-case formula.
inline double b_levels_oracle(const LevelsWeights& w, std::size_t k1, std::size_t k2, std::size_t L1,
                              std::size_t L2, std::size_t grid) {
  check_levels_args(k1, k2, L1, L2);
  require(grid >= 2, "b_levels_oracle: grid must be at least 2");
  require(w.w1 > 0.0 && w.w2 > 0.0, "levels weights must be positive");
  const double K1 = static_cast<double>(k1), K2 = static_cast<double>(k2);
  const double l1 = static_cast<double>(L1), l2 = static_cast<double>(L2);
  const double a = K1 * w.w1 * w.w1 + K2 * w.w2 * w.w2;
  double best = 0.0;
  for (std::size_t j = 0; j < grid; ++j) {
    const double b1 = static_cast<double>(j) / static_cast<double>(grid - 1);
    const double b2 = 1.0 - b1;
    const double lambda = w.w1 * (K1 + l1) * b1 + w.w2 * (K2 + l2) * b2;
    double v;
    if (lambda >= a * std::max(b1 / w.w1, b2 / w.w2)) {
      v = lambda * lambda / a;
    } else {
      const double r1 = lambda - K1 * w.w1 * b1, r2 = lambda - K2 * w.w2 * b2;
      v = std::min(K1 * b1 * b1 + r1 * r1 / (K2 * w.w2 * w.w2), K2 * b2 * b2 + r2 * r2 / (K1 * w.w1 * w.w1));
    }
    const double num = l1 * b1 * b1 + l2 * b2 * b2;
    best = std::max(best, num / (v + K1 * b1 * b1 + K2 * b2 * b2));
  }
  return best;
}

inline void check_theorem_regime(std::size_t k1, std::size_t k2, std::size_t n1, std::size_t n2) {
  require(k1 >= 2 && k2 >= 2, "levels optimum needs k_i >= 2");
  require(n1 >= 4 * k1 && n2 >= 4 * k2, "levels optimum needs n_i >= 4 k_i");
}

// Per-level maximum of g1(L/k; a) over the two integers around k sqrt(1+1/a).
// Unchecked: callers validate a.
inline double level_peak(std::size_t k, double a) {
  const double K = static_cast<double>(k);
  const double x = K * std::sqrt(1.0 + 1.0 / a);
  auto g = [a](double u) { return u / (a * (u + 1.0) * (u + 1.0) + 1.0); };
  return std::max(g(std::floor(x) / K), g(std::ceil(x) / K));
}

inline double h1_H1(double a, std::size_t k1, std::size_t k2, std::size_t n1, std::size_t n2) {
  check_theorem_regime(k1, k2, n1, n2);
  require(a >= kATilde - 1e-15 && a <= 1.0 - kATilde + 1e-15, "H1 needs a in [2 sqrt 3 - 3, 4 - 2 sqrt 3]");
  return std::max(level_peak(k1, a), level_peak(k2, 1.0 - a));
}

struct LevelsOptimum {
  double nu1_star = 0.5;
  double ratio = 1.0;  // w2*/w1*
  double b_value = 0.0;
  double delta_nec = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::size_t grid_size = 0;
};

inline LevelsOptimum optimal_weights(std::size_t k1, std::size_t k2, std::size_t n1, std::size_t n2, std::size_t grid,
                                     std::size_t workers = 1) {
  check_theorem_regime(k1, k2, n1, n2);
  require(grid >= 1000, "optimal_weights: grid must be at least 1000");
  const double lo = kATilde, hi = 1.0 - kATilde;
  auto at = [&](std::size_t j) {
    return j + 1 == grid ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(grid - 1);
  };

  // Chunked argmin; ties resolve to the lowest grid index.
  const std::size_t chunks = (grid + kChunk * 16 - 1) / (kChunk * 16);
  std::vector<std::size_t> arg(chunks);
  std::vector<double> val(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk * 16, end = std::min(grid, begin + kChunk * 16);
    double bv = std::numeric_limits<double>::infinity();
    std::size_t bj = begin;
    for (std::size_t j = begin; j < end; ++j) {
      const double a = at(j);
      const double h = std::max(level_peak(k1, a), level_peak(k2, 1.0 - a));
      if (h < bv) {
        bv = h;
        bj = j;
      }
    }
    arg[c] = bj;
    val[c] = bv;
  });
  std::size_t best = 0;
  for (std::size_t c = 1; c < chunks; ++c)
    if (val[c] < val[best]) best = c;

  LevelsOptimum o;
  o.grid_size = grid;
  o.nu1_star = at(arg[best]);
  o.b_value = val[best];
  o.delta_nec = 1.0 / (1.0 + 2.0 * o.b_value);
  const double K1 = static_cast<double>(k1), K2 = static_cast<double>(k2);
  o.ratio = std::sqrt(K1 / K2 * (1.0 / o.nu1_star - 1.0));

  // Reference weights (1/sqrt k1, 1/sqrt k2) give nu_1 = 1/2.
  const double r1 = 1.0 / std::sqrt(K1), r2 = 1.0 / std::sqrt(K2);
  const double cosine = (r1 + o.ratio * r2) / (std::sqrt(1.0 + o.ratio * o.ratio) * std::sqrt(r1 * r1 + r2 * r2));
  o.c1 = std::abs(1.0 - cosine);
  const double nu_ref = nu1({r1, r2}, k1, k2);
  const double h_ref = std::max(level_peak(k1, nu_ref), level_peak(k2, 1.0 - nu_ref));
  o.c2 = std::abs(o.delta_nec - 1.0 / (1.0 + 2.0 * h_ref));
  return o;
}

struct SweepRow {
  std::size_t k1 = 0, k2 = 0;
  LevelsOptimum opt;
};

// Optimal weights for every (k1, k2) in [kmin, kmax]^2 with n_i = n_factor k_i.
inline std::vector<SweepRow> sweep_levels(std::size_t kmin, std::size_t kmax, std::size_t grid, std::size_t workers = 1,
                                          std::size_t n_factor = 4) {
  require(kmin >= 2 && kmin <= kmax, "sweep_levels needs 2 <= kmin <= kmax");
  require(n_factor >= 4, "sweep_levels needs n_i >= 4 k_i");
  const std::size_t side = kmax - kmin + 1;
  std::vector<SweepRow> rows(side * side);
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const std::size_t k1 = kmin + i / side, k2 = kmin + i % side;
    rows[i] = {k1, k2, optimal_weights(k1, k2, n_factor * k1, n_factor * k2, grid, 1)};
  });
  return rows;
}

}  // namespace regcomply
