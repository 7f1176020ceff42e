#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "simplex.hpp"

namespace regcomply {

struct Regularizer {
  enum class Kind { weighted_l1, levels_l1, nuclear, finite_atomic };
  Kind kind = Kind::weighted_l1;
  std::vector<double> weights;  // weighted_l1
  double w1 = 1.0, w2 = 1.0;    // levels_l1
  std::size_t n1 = 0;           // levels_l1: length of the first block
  std::vector<Point> atoms;     // finite_atomic

  static Regularizer weighted_l1(std::vector<double> w) {
    require(!w.empty(), "WeightedL1 needs at least one weight");
    for (double v : w) require(v > 0.0 && std::isfinite(v), "WeightedL1 weights must be positive and finite");
    Regularizer r;
    r.kind = Kind::weighted_l1;
    r.weights = std::move(w);
    return r;
  }
  static Regularizer l1(std::size_t n) { return weighted_l1(std::vector<double>(n, 1.0)); }
  static Regularizer levels_l1(double w1, double w2, std::size_t n1) {
    require(w1 > 0.0 && w2 > 0.0 && std::isfinite(w1) && std::isfinite(w2), "LevelsL1 weights must be positive");
    Regularizer r;
    r.kind = Kind::levels_l1;
    r.w1 = w1;
    r.w2 = w2;
    r.n1 = n1;
    return r;
  }
  static Regularizer nuclear() {
    Regularizer r;
    r.kind = Kind::nuclear;
    return r;
  }
  static Regularizer finite_atomic(std::vector<Point> atoms) {
    require(!atoms.empty(), "FiniteAtomic needs at least one atom");
    for (const auto& a : atoms) {
      require_same_space(a, atoms.front());
      require(norm_sq(a) > 0.0, "FiniteAtomic atoms must be nonzero");
    }
    Regularizer r;
    r.kind = Kind::finite_atomic;
    r.atoms = std::move(atoms);
    return r;
  }

  bool polyhedral_l1() const { return kind == Kind::weighted_l1 || kind == Kind::levels_l1; }
};

inline std::string to_string(Regularizer::Kind k) {
  switch (k) {
    case Regularizer::Kind::weighted_l1: return "weighted_l1";
    case Regularizer::Kind::levels_l1: return "levels_l1";
    case Regularizer::Kind::nuclear: return "nuclear";
    case Regularizer::Kind::finite_atomic: return "finite_atomic";
  }
  return {};
}

// Per-coordinate weights of an l1-type regularizer on a vector of length d.
inline std::vector<double> expanded_weights(const Regularizer& reg, std::size_t d) {
  if (reg.kind == Regularizer::Kind::weighted_l1) {
    require(reg.weights.size() == d, "WeightedL1: weight count does not match the point dimension");
    return reg.weights;
  }
  require(reg.kind == Regularizer::Kind::levels_l1, "expanded_weights: not an l1-type regularizer");
  require(reg.n1 <= d, "LevelsL1: first block longer than the point");
  std::vector<double> w(d, reg.w2);
  std::fill(w.begin(), w.begin() + reg.n1, reg.w1);
  return w;
}

struct GaugeCertificate {
  double value = std::numeric_limits<double>::infinity();
  bool infinite = true;
  std::vector<double> coefficients;  // empty when infinite
};

// ||x||_A = min sum(mu) s.t. sum mu_j a_j = x, mu >= 0.
inline GaugeCertificate gauge_lp(const std::vector<Point>& atoms, const Point& x) {
  require(!atoms.empty(), "gauge_lp: empty atom set");
  for (const auto& a : atoms) require_same_space(a, x);
  const std::size_t m = x.data.size(), n = atoms.size();
  Matrix A(m, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) A(i, j) = atoms[j].data[i];
  const auto res = solve_lp(A, x.data, std::vector<double>(n, 1.0));
  GaugeCertificate cert;
  if (res.status != LpResult::Status::optimal) return cert;
  cert.infinite = false;
  cert.value = res.value;
  cert.coefficients = res.x;
  return cert;
}

inline double evaluate(const Regularizer& reg, const Point& x) {
  switch (reg.kind) {
    case Regularizer::Kind::weighted_l1:
    case Regularizer::Kind::levels_l1: {
      require(!x.is_matrix(), "l1-type regularizer needs a vector point");
      const auto w = expanded_weights(reg, x.data.size());
      std::vector<double> terms(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * std::abs(x.data[i]);
      return sorted_sum(std::move(terms));
    }
    case Regularizer::Kind::nuclear: {
      require(x.is_matrix(), "nuclear norm needs a symmetric matrix point");
      auto ev = spectrum(x);
      for (double& v : ev) v = std::abs(v);
      return sorted_sum(std::move(ev));
    }
    case Regularizer::Kind::finite_atomic:
      return gauge_lp(reg.atoms, x).value;
  }
  return 0.0;
}

inline void check_compatible(const Regularizer& reg, const ModelSet& model) {
  using K = ModelSet::Kind;
  switch (reg.kind) {
    case Regularizer::Kind::weighted_l1:
      require(model.kind == K::sparse, "WeightedL1 pairs with the sparse model");
      require(reg.weights.size() == model.n, "WeightedL1: weight count does not match n");
      return;
    case Regularizer::Kind::levels_l1:
      require(model.kind == K::levels, "LevelsL1 pairs with the levels model");
      require(reg.n1 == model.n, "LevelsL1: block split does not match n1");
      return;
    case Regularizer::Kind::nuclear:
      require(model.kind == K::low_rank_sym, "Nuclear pairs with the low-rank model");
      return;
    case Regularizer::Kind::finite_atomic:
      for (const auto& a : reg.atoms) check_point(model, a);
      return;
  }
}

// Relative slack on cone boundary comparisons, so exact boundary points
// survive rounding.
inline constexpr double kConeTol = 1e-12;

// Exact head-versus-tail test: the k largest of v_i against the rest, summed in
// sorted order.
inline bool head_dominates(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end(), std::greater<>());
  k = std::min(k, v.size());
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < k; ++i) head += v[i];
  for (std::size_t i = v.size(); i-- > k;) tail += v[i];
  return head >= tail - kConeTol * (head + tail);
}

// Directional derivative of a weighted l1 norm at x along z.
inline double l1_directional_derivative(const std::vector<double>& w, const std::vector<double>& x,
                                        const std::vector<double>& z) {
  std::vector<double> terms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    terms[i] = x[i] != 0.0 ? w[i] * (x[i] > 0 ? z[i] : -z[i]) : w[i] * std::abs(z[i]);
  return sorted_sum(std::move(terms));
}

// True iff R(x + t z) <= R(x) for some t != 0 (membership of z in T_R(x)).
inline bool descent_direction_test(const Regularizer& reg, const Point& x, const Point& z) {
  require_same_space(x, z);
  if (std::all_of(z.data.begin(), z.data.end(), [](double v) { return v == 0.0; })) return true;
  switch (reg.kind) {
    case Regularizer::Kind::weighted_l1:
    case Regularizer::Kind::levels_l1: {
      // R is linear along x + t z for |t| below the first sign change, so the
      // sign of the one-sided derivative along +z or -z decides membership.
      const auto w = expanded_weights(reg, x.data.size());
      double scale = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) scale += w[i] * std::abs(z.data[i]);
      const double tol = kConeTol * scale;
      auto neg = z.data;
      for (double& v : neg) v = -v;
      return l1_directional_derivative(w, x.data, z.data) <= tol ||
             l1_directional_derivative(w, x.data, neg) <= tol;
    }
    case Regularizer::Kind::nuclear: {
      // ||.||_*'(x; z) = tr(U+^T z U+) - tr(U-^T z U-) + ||U0^T z U0||_*.
      const auto e = eig_sym(x.dense());
      const Matrix zd = z.dense();
      const std::size_t n = x.side;
      const double lmax = e.values.empty() ? 0.0 : std::abs(e.values.front());
      double lin = 0.0;
      std::vector<std::size_t> null_idx;
      for (std::size_t j = 0; j < n; ++j) {
        const double lam = e.values[j];
        if (std::abs(lam) <= 1e-12 * lmax || lmax == 0.0) {
          null_idx.push_back(j);
          continue;
        }
        double q = 0.0;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) q += e.vectors(a, j) * zd(a, b) * e.vectors(b, j);
        lin += lam > 0 ? q : -q;
      }
      double null_part = 0.0;
      if (!null_idx.empty()) {
        const std::size_t m = null_idx.size();
        Matrix c(m, m);
        for (std::size_t p = 0; p < m; ++p)
          for (std::size_t q = 0; q < m; ++q) {
            double s = 0.0;
            for (std::size_t a = 0; a < n; ++a)
              for (std::size_t b = 0; b < n; ++b)
                s += e.vectors(a, null_idx[p]) * zd(a, b) * e.vectors(b, null_idx[q]);
            c(p, q) = s;
          }
        for (std::size_t p = 0; p < m; ++p)
          for (std::size_t q = p + 1; q < m; ++q) c(p, q) = c(q, p) = 0.5 * (c(p, q) + c(q, p));
        for (double v : eig_sym(c).values) null_part += std::abs(v);
      }
      const double tol = kConeTol * evaluate(Regularizer::nuclear(), z);
      return null_part <= std::abs(lin) + tol;
    }
    case Regularizer::Kind::finite_atomic: {
      // Convexity makes the feasible steps an interval around 0, so shrinking
      // probes find any descent step that exists (up to the smallest probe).
      const auto rx = gauge_lp(reg.atoms, x);
      if (rx.infinite) return false;
      const double base = norm(x) / norm(z);
      double t = base > 0.0 ? base : 1.0;
      for (int i = 0; i < 12; ++i, t *= 0.25)
        for (double sgn : {1.0, -1.0}) {
          const auto r = gauge_lp(reg.atoms, x + (sgn * t) * z);
          if (!r.infinite && r.value <= rx.value * (1.0 + 1e-10) + 1e-12) return true;
        }
      return false;
    }
  }
  return false;
}

enum class ConeVerdict { member, non_member, witnessed, no_witness_found };

inline std::string to_string(ConeVerdict v) {
  switch (v) {
    case ConeVerdict::member: return "member";
    case ConeVerdict::non_member: return "non_member";
    case ConeVerdict::witnessed: return "witnessed";
    case ConeVerdict::no_witness_found: return "no_witness_found";
  }
  return {};
}

// Deterministic points of Sigma used as anchors for the witness search.
inline std::vector<Point> cone_anchor_points(const ModelSet& model, const Regularizer& reg) {
  std::vector<Point> out;
  for (const auto& a : reg.atoms) {
    const Point p = project_model(model, a);
    if (norm_sq(a - p) <= 1e-20 * norm_sq(a)) out.push_back(a);
  }
  // Sums of pairs of atoms that stay in Sigma.
  for (std::size_t i = 0; i < reg.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < reg.atoms.size(); ++j) {
      const Point s = reg.atoms[i] + reg.atoms[j];
      if (norm_sq(s) == 0.0) continue;
      const Point p = project_model(model, s);
      if (norm_sq(s - p) <= 1e-20 * norm_sq(s)) out.push_back(s);
    }
  return out;
}

// Membership of z in T_R(Sigma). Exact for the three closed-form variants;
// for FiniteAtomic a positive answer is backed by an explicit anchor x in Sigma.
inline ConeVerdict cone_test(const Regularizer& reg, const ModelSet& model, const Point& z) {
  check_compatible(reg, model);
  check_point(model, z);
  const bool zero = std::all_of(z.data.begin(), z.data.end(), [](double v) { return v == 0.0; });
  switch (reg.kind) {
    case Regularizer::Kind::weighted_l1: {
      if (zero) return ConeVerdict::member;
      std::vector<double> v(z.data.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = reg.weights[i] * std::abs(z.data[i]);
      return head_dominates(std::move(v), model.k) ? ConeVerdict::member : ConeVerdict::non_member;
    }
    case Regularizer::Kind::levels_l1: {
      if (zero) return ConeVerdict::member;
      const auto mask = model_support(model, z.data);
      std::vector<double> head, tail;
      for (std::size_t i = 0; i < z.data.size(); ++i) {
        const double v = (i < model.n ? reg.w1 : reg.w2) * std::abs(z.data[i]);
        (mask[i] ? head : tail).push_back(v);
      }
      const double h = sorted_sum(head), t = sorted_sum(tail);
      return h >= t - kConeTol * (h + t) ? ConeVerdict::member : ConeVerdict::non_member;
    }
    case Regularizer::Kind::nuclear: {
      if (zero) return ConeVerdict::member;
      auto ev = spectrum(z);
      for (double& v : ev) v = std::abs(v);
      return head_dominates(std::move(ev), model.k) ? ConeVerdict::member : ConeVerdict::non_member;
    }
    case Regularizer::Kind::finite_atomic: {
      if (zero) return ConeVerdict::witnessed;
      for (const auto& x : cone_anchor_points(model, reg))
        if (descent_direction_test(reg, x, z)) return ConeVerdict::witnessed;
      return ConeVerdict::no_witness_found;
    }
  }
  return ConeVerdict::non_member;
}

inline bool in_descent_cone(const Regularizer& reg, const ModelSet& model, const Point& z) {
  const auto v = cone_test(reg, model, z);
  return v == ConeVerdict::member || v == ConeVerdict::witnessed;
}

// z = v1 - alpha v0 with alpha = max(R(v1)/R(v0), 1); z lies in T_R(Sigma)
// whenever v0 lies in Sigma.
inline Point build_descent_vector(const Regularizer& reg, const Point& v0, const Point& v1) {
  require_same_space(v0, v1);
  const double r0 = evaluate(reg, v0);
  require(r0 > 0.0 && std::isfinite(r0), "build_descent_vector: R(v0) must be positive and finite");
  const double alpha = std::max(evaluate(reg, v1) / r0, 1.0);
  return v1 - alpha * v0;
}

inline Regularizer scaled(const Regularizer& reg, double s) {
  require(s > 0.0, "scaled: factor must be positive");
  Regularizer r = reg;
  for (double& w : r.weights) w *= s;
  r.w1 *= s;
  r.w2 *= s;
  for (auto& a : r.atoms) a = (1.0 / s) * a;
  return r;
}

}  // namespace regcomply
