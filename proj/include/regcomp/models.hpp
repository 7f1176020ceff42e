#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace regcomply {

// Element of the ambient space: a dense vector, or a symmetric matrix stored
// as its packed upper triangle (row-major, i <= j).
struct Point {
  std::vector<double> data;
  std::size_t side = 0;  // 0 for vectors

  static Point vector(std::vector<double> v) { return Point{std::move(v), 0}; }

  static Point sym(std::size_t n, std::vector<double> packed) {
    require(n >= 1 && packed.size() == n * (n + 1) / 2, "Point::sym: packed length does not match side");
    return Point{std::move(packed), n};
  }

  static Point from_dense(const Matrix& m) {
    require(m.rows == m.cols && m.rows >= 1, "Point::from_dense: matrix is not square");
    Point p{std::vector<double>(), m.rows};
    p.data.reserve(m.rows * (m.rows + 1) / 2);
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = i; j < m.rows; ++j) p.data.push_back(0.5 * (m(i, j) + m(j, i)));
    return p;
  }

  static Point diag(const std::vector<double>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return from_dense(m);
  }

  bool is_matrix() const { return side != 0; }

  // Vector length, or matrix side.
  std::size_t dim() const { return is_matrix() ? side : data.size(); }

  Matrix dense() const {
    require(is_matrix(), "Point::dense: not a matrix");
    Matrix m(side, side);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = i; j < side; ++j) m(i, j) = m(j, i) = data[idx++];
    return m;
  }

  bool operator==(const Point&) const = default;
};

inline void require_same_space(const Point& x, const Point& y) {
  require(x.side == y.side && x.data.size() == y.data.size(), "points live in different spaces");
}

inline Point operator+(Point x, const Point& y) {
  require_same_space(x, y);
  for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += y.data[i];
  return x;
}

inline Point operator-(Point x, const Point& y) {
  require_same_space(x, y);
  for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] -= y.data[i];
  return x;
}

inline Point operator*(double s, Point x) {
  for (double& v : x.data) v *= s;
  return x;
}

// Hilbert inner product: Euclidean for vectors, Frobenius for matrices.
inline double inner(const Point& x, const Point& y) {
  require_same_space(x, y);
  if (!x.is_matrix()) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) s += x.data[i] * y.data[i];
    return s;
  }
  double s = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < x.side; ++i)
    for (std::size_t j = i; j < x.side; ++j, ++idx) s += (i == j ? 1.0 : 2.0) * x.data[idx] * y.data[idx];
  return s;
}

inline double norm_sq(const Point& x) { return inner(x, x); }
inline double norm(const Point& x) { return std::sqrt(norm_sq(x)); }

struct ModelSet {
  enum class Kind { sparse, low_rank_sym, levels };
  Kind kind = Kind::sparse;
  std::size_t k = 1;   // k, r, or k1
  std::size_t n = 1;   // n, matrix side, or n1
  std::size_t k2 = 0;  // levels only
  std::size_t n2 = 0;  // levels only

  static ModelSet sparse(std::size_t k, std::size_t n) {
    require(k >= 1 && k <= n, "Sparse model needs 1 <= k <= n");
    return {Kind::sparse, k, n, 0, 0};
  }
  static ModelSet low_rank_sym(std::size_t r, std::size_t n) {
    require(r >= 1 && r <= n, "LowRankSym model needs 1 <= r <= n");
    return {Kind::low_rank_sym, r, n, 0, 0};
  }
  static ModelSet levels(std::size_t k1, std::size_t k2, std::size_t n1, std::size_t n2) {
    require(k1 >= 1 && k1 <= n1 && k2 >= 1 && k2 <= n2, "Levels model needs 1 <= k_i <= n_i");
    return {Kind::levels, k1, n1, k2, n2};
  }

  // Length of the point vector (vectors) or matrix side.
  std::size_t ambient_dim() const { return kind == Kind::levels ? n + n2 : n; }

  // Uniform recovery by a non-invertible operator is impossible when the
  // secant set fills the space.
  bool secant_fills_space() const {
    if (kind == Kind::levels) return 2 * k >= n && 2 * k2 >= n2;
    return 2 * k >= n;
  }

  bool operator==(const ModelSet&) const = default;
};

inline std::string to_string(const ModelSet& m) {
  switch (m.kind) {
    case ModelSet::Kind::sparse:
      return "sparse:k=" + std::to_string(m.k) + ",n=" + std::to_string(m.n);
    case ModelSet::Kind::low_rank_sym:
      return "lowrank:r=" + std::to_string(m.k) + ",n=" + std::to_string(m.n);
    case ModelSet::Kind::levels:
      return "levels:k1=" + std::to_string(m.k) + ",k2=" + std::to_string(m.k2) + ",n1=" + std::to_string(m.n) +
             ",n2=" + std::to_string(m.n2);
  }
  return {};
}

inline void check_point(const ModelSet& model, const Point& z) {
  if (model.kind == ModelSet::Kind::low_rank_sym)
    require(z.is_matrix() && z.side == model.n, "point does not match the matrix side of the model");
  else
    require(!z.is_matrix() && z.data.size() == model.ambient_dim(), "point does not match the model dimension");
}

inline ModelSet secant_model(const ModelSet& m) {
  ModelSet s = m;
  s.k = std::min(2 * m.k, m.n);
  if (m.kind == ModelSet::Kind::levels) s.k2 = std::min(2 * m.k2, m.n2);
  return s;
}

// Indices of the k largest |v_i|; ties go to the lowest index.
inline std::vector<std::size_t> top_k_indices(const std::vector<double>& v, std::size_t k) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return std::abs(v[i]) > std::abs(v[j]); });
  idx.resize(std::min(k, v.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Support of P_Sigma(z) for vector models, as a 0/1 mask.
inline std::vector<char> model_support(const ModelSet& model, const std::vector<double>& z) {
  std::vector<char> mask(z.size(), 0);
  if (model.kind == ModelSet::Kind::levels) {
    std::vector<double> b1(z.begin(), z.begin() + model.n), b2(z.begin() + model.n, z.end());
    for (auto i : top_k_indices(b1, model.k)) mask[i] = 1;
    for (auto i : top_k_indices(b2, model.k2)) mask[model.n + i] = 1;
  } else {
    for (auto i : top_k_indices(z, model.k)) mask[i] = 1;
  }
  return mask;
}

// Eigenvalues of a symmetric point, sorted by decreasing magnitude.
inline std::vector<double> spectrum(const Point& z) { return eig_sym(z.dense()).values; }

inline Point project_model(const ModelSet& model, const Point& z) {
  check_point(model, z);
  if (model.kind == ModelSet::Kind::low_rank_sym) {
    auto e = eig_sym(z.dense());
    for (std::size_t j = model.k; j < e.values.size(); ++j) e.values[j] = 0.0;
    return Point::from_dense(reconstruct(e.vectors, e.values));
  }
  const auto mask = model_support(model, z.data);
  Point p = z;
  for (std::size_t i = 0; i < p.data.size(); ++i)
    if (!mask[i]) p.data[i] = 0.0;
  return p;
}

// Squared energies ||P_Sigma z||^2 and ||z - P_Sigma z||^2, summed over sorted
// magnitudes so that the result is invariant under signed permutations.
struct EnergySplit {
  double head = 0.0;
  double tail = 0.0;
};

inline EnergySplit energy_split(const ModelSet& model, const Point& z) {
  check_point(model, z);
  auto split = [](std::vector<double> v, std::size_t k, EnergySplit& acc) {
    for (double& x : v) x = x * x;
    std::sort(v.begin(), v.end(), std::greater<>());
    const std::size_t kk = std::min(k, v.size());
    double h = 0.0, t = 0.0;
    for (std::size_t i = 0; i < kk; ++i) h += v[i];
    for (std::size_t i = v.size(); i-- > kk;) t += v[i];
    acc.head += h;
    acc.tail += t;
  };
  EnergySplit out;
  switch (model.kind) {
    case ModelSet::Kind::sparse:
      split(z.data, model.k, out);
      break;
    case ModelSet::Kind::low_rank_sym:
      split(spectrum(z), model.k, out);
      break;
    case ModelSet::Kind::levels:
      split(std::vector<double>(z.data.begin(), z.data.begin() + model.n), model.k, out);
      split(std::vector<double>(z.data.begin() + model.n, z.data.end()), model.k2, out);
      break;
  }
  return out;
}

// k-support norm of a vector: the gauge of conv{unit-norm k-sparse vectors}.
// With a_1 >= ... >= a_d the sorted magnitudes and a_0 = +inf, the unique
// r in {0..k-1} with a_{k-r-1} > S_r/(r+1) >= a_{k-r}, S_r = sum_{i>=k-r} a_i,
// gives ||z||^2 = sum_{i<k-r} a_i^2 + S_r^2/(r+1).
inline double k_support_norm(const std::vector<double>& z, std::size_t k) {
  require(k >= 1, "k_support_norm: k must be positive");
  std::vector<double> a(z.size());
  std::transform(z.begin(), z.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end(), std::greater<>());
  const std::size_t d = a.size();
  if (d == 0 || a[0] == 0.0) return 0.0;
  k = std::min(k, d);

  // 1-indexed accessor with a_0 = +inf.
  auto at = [&](std::size_t i) { return i == 0 ? std::numeric_limits<double>::infinity() : a[i - 1]; };
  std::vector<double> suffix(d + 2, 0.0);  // suffix[i] = sum_{j>=i} a_j
  for (std::size_t i = d; i >= 1; --i) suffix[i] = suffix[i + 1] + a[i - 1];

  std::size_t best_r = 0;
  double best_violation = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < k; ++r) {
    const double mean = suffix[k - r] / static_cast<double>(r + 1);
    const double upper = at(k - r - 1);
    const double violation = std::max(0.0, mean - upper) + std::max(0.0, at(k - r) - mean);
    if (violation < best_violation) {
      best_violation = violation;
      best_r = r;
      if (violation == 0.0) break;
    }
  }
  double s = 0.0;
  for (std::size_t i = 1; i + best_r < k; ++i) s += a[i - 1] * a[i - 1];
  const double t = suffix[k - best_r];
  return std::sqrt(s + t * t / static_cast<double>(best_r + 1));
}

// ||z||_Sigma, the gauge of conv(Sigma intersected with the unit sphere).
inline double model_norm(const ModelSet& model, const Point& z) {
  check_point(model, z);
  switch (model.kind) {
    case ModelSet::Kind::sparse:
      return k_support_norm(z.data, model.k);
    case ModelSet::Kind::low_rank_sym:
      return k_support_norm(spectrum(z), model.k);
    case ModelSet::Kind::levels:
      break;
  }
  throw Unsupported("model_norm: not available for the levels model");
}

}  // namespace regcomply
