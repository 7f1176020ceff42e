#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "regularizers.hpp"
#include "rng.hpp"

namespace regcomply {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Rows are measurements.
using LinearOperator = Matrix;

inline constexpr double kEnumerationCap = 1e6;

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

// Advances a sorted combination of {0..n-1}; false after the last one.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Calls fn(T) for every maximal support T of the secant set.
inline void for_each_secant_support(const ModelSet& model, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (model.kind == ModelSet::Kind::low_rank_sym) throw Unsupported("support enumeration is unavailable for the low-rank model");
  const ModelSet s = secant_model(model);
  double count = binomial(s.n, s.k);
  if (s.kind == ModelSet::Kind::levels) count *= binomial(s.n2, s.k2);
  if (count > kEnumerationCap) throw InstanceTooLarge("support enumeration exceeds the 1e6 cap");

  std::vector<std::size_t> c1(s.k);
  std::iota(c1.begin(), c1.end(), 0);
  do {
    if (s.kind != ModelSet::Kind::levels) {
      fn(c1);
      continue;
    }
    std::vector<std::size_t> c2(s.k2);
    std::iota(c2.begin(), c2.end(), 0);
    do {
      std::vector<std::size_t> t = c1;
      for (auto i : c2) t.push_back(s.n + i);
      fn(t);
    } while (next_combination(c2, s.n2));
  } while (next_combination(c1, s.n));
}

struct GramBounds {
  double lo = kInf;   // inf of ||Mx||^2 over unit secant x
  double hi = 0.0;    // sup of the same
};

inline GramBounds secant_gram_bounds(const ModelSet& model, const LinearOperator& M) {
  if (model.kind == ModelSet::Kind::low_rank_sym) throw Unsupported("support enumeration is unavailable for the low-rank model");
  require(M.rows >= 1, "operator needs at least one row");
  require(M.cols == model.ambient_dim(), "operator column count does not match the model dimension");
  for (double v : M.a) require(std::isfinite(v), "operator entries must be finite");
  GramBounds g;
  for_each_secant_support(model, [&](const std::vector<std::size_t>& t) {
    // Extreme eigenvalues of M_T^T M_T as squared singular values of M_T.
    Matrix mt(M.rows, t.size());
    for (std::size_t r = 0; r < M.rows; ++r)
      for (std::size_t j = 0; j < t.size(); ++j) mt(r, j) = M(r, t[j]);
    auto sv = singular_values(mt);
    if (M.rows < t.size()) sv.push_back(0.0);
    for (double v : sv) {
      g.lo = std::min(g.lo, v * v);
      g.hi = std::max(g.hi, v * v);
    }
  });
  return g;
}

inline double rip_constant(const ModelSet& model, const LinearOperator& M) {
  const auto g = secant_gram_bounds(model, M);
  return std::max(std::abs(g.hi - 1.0), std::abs(g.lo - 1.0));
}

// Eigenvalues below this fraction of the largest count as zero.
inline constexpr double kKernelTol = 1e-12;

inline double restricted_conditioning(const ModelSet& model, const LinearOperator& M) {
  const auto g = secant_gram_bounds(model, M);
  if (g.hi <= 0.0 || g.lo <= kKernelTol * g.hi) return kInf;
  return g.hi / g.lo;
}

enum class Conversion { rip_to_rc, rc_to_rip };

inline double rip_rc_convert(double value, Conversion dir) {
  if (dir == Conversion::rip_to_rc) {
    require(value >= 0.0 && value < 1.0, "RIP constant must lie in [0,1)");
    return (1.0 + value) / (1.0 - value);
  }
  require(value >= 1.0, "restricted conditioning must be >= 1");
  if (std::isinf(value)) return 1.0;
  return (value - 1.0) / (value + 1.0);
}

// gamma(I - Pi_z) = 1/(1 - ||P_{Sigma-Sigma} z||^2/||z||^2).
inline double gamma_nec_point(const ModelSet& model, const Point& z) {
  const auto e = energy_split(secant_model(model), z);
  const double total = e.head + e.tail;
  require(total > 0.0, "gamma_nec_point: z must be nonzero");
  if (e.tail <= kKernelTol * kKernelTol * total) return kInf;
  return total / e.tail;
}

// ||z - P_{Sigma-Sigma} z||^2 / ||P_{Sigma-Sigma} z||^2.
inline double b_measure_value(const ModelSet& model, const Point& z) {
  const auto e = energy_split(secant_model(model), z);
  require(e.head > 0.0, "b_measure_value: secant projection of z is zero");
  return e.tail / e.head;
}

struct BStar {
  double b = 0.0;
  std::size_t argmax_L = 0;  // lowest maximizer
  double delta_nec = 1.0;
};

// max over 1 <= L <= n-2k of (L/k)/((L/k+1)^2+1) = Lk/((L+k)^2+k^2).
inline BStar b_star_sparse(std::size_t k, std::size_t n) {
  require(k >= 1 && 2 * k < n, "b_star_sparse needs 1 <= k < n/2");
  std::size_t best = 1;
  for (std::size_t L = 2; L + 2 * k <= n; ++L) {
    // Compare L k/((L+k)^2+k^2) against the incumbent exactly in integers.
    const auto num = [&](std::size_t l) { return static_cast<unsigned __int128>(l * k); };
    const auto den = [&](std::size_t l) { return static_cast<unsigned __int128>((l + k) * (l + k) + k * k); };
    if (num(L) * den(best) > num(best) * den(L)) best = L;
  }
  BStar r;
  r.argmax_L = best;
  r.b = static_cast<double>(best * k) / static_cast<double>((best + k) * (best + k) + k * k);
  r.delta_nec = 1.0 / (1.0 + 2.0 * r.b);
  return r;
}

// D = 1 for the l1 and nuclear norms in this regime.
inline double delta_suff_l1(std::size_t k, std::size_t n) {
  require(k >= 1 && 2 * k < n, "delta_suff_l1 needs 1 <= k < n/2");
  const double d = 1.0;
  return std::sqrt(1.0 / (1.0 + d));
}

namespace detail {

// ||z_{T^c}||_Sigma^2 / ||z_T||^2 with T the top-s support (s = k for the
// measure, s = 2k for the secant variant); norm taken for the model order k.
inline double d_ratio(const ModelSet& model, const Point& z, std::size_t s) {
  check_point(model, z);
  if (model.kind == ModelSet::Kind::levels) throw Unsupported("D measure is unavailable for the levels model");
  std::vector<double> v = model.kind == ModelSet::Kind::low_rank_sym ? spectrum(z) : z.data;
  const auto head_idx = top_k_indices(v, s);
  double head = 0.0;
  for (auto i : head_idx) {
    head += v[i] * v[i];
    v[i] = 0.0;
  }
  require(head > 0.0, "D measure: top part of z is zero");
  const double t = k_support_norm(v, model.k);
  return t * t / head;
}

}  // namespace detail

inline double d_measure_value(const ModelSet& model, const Point& z) { return detail::d_ratio(model, z, model.k); }

// Variant normalized by the secant projection instead of P_Sigma.
inline double d_measure_value_secant(const ModelSet& model, const Point& z) {
  return detail::d_ratio(model, z, std::min(2 * model.k, model.n));
}

inline bool is_uniform_l1(const Regularizer& reg) {
  if (reg.kind != Regularizer::Kind::weighted_l1) return false;
  return std::all_of(reg.weights.begin(), reg.weights.end(), [&](double w) { return w == reg.weights.front(); });
}

inline bool is_canonical(const Regularizer& reg, const ModelSet& model) {
  if (model.kind == ModelSet::Kind::sparse) return is_uniform_l1(reg) && reg.weights.size() == model.n;
  if (model.kind == ModelSet::Kind::low_rank_sym) return reg.kind == Regularizer::Kind::nuclear;
  return false;
}

struct DProfile {
  double d = 0.0;
  std::vector<double> per_L;  // per_L[L-1], L = 1..n-k
};

// Witnesses -alpha 1_{H0} + 1_{H1}, |H0| = k, |H1| = L, alpha = max(1, L/k),
// placed at `budget` random positions (random eigenbases for matrices).
inline DProfile d_sup_structured(const ModelSet& model, const Regularizer& reg, std::size_t budget,
                                 std::uint64_t seed = 1) {
  require(model.kind != ModelSet::Kind::levels, "d_sup_structured: levels model unsupported");
  check_compatible(reg, model);
  require(is_canonical(reg, model), "d_sup_structured needs the l1 norm (sparse) or the nuclear norm (low rank)");
  require(budget >= 1, "d_sup_structured: budget must be at least 1");
  const std::size_t k = model.k, n = model.n;
  DProfile out;
  for (std::size_t L = 1; L + k <= n; ++L) {
    const double alpha = std::max(1.0, static_cast<double>(L) / static_cast<double>(k));
    double best = 0.0;
    for (std::size_t b = 0; b < budget; ++b) {
      Rng rng = make_stream(seed, L, b);
      std::vector<double> d(n, 0.0);
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      if (b > 0) std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t i = 0; i < k; ++i) d[perm[i]] = -alpha;
      for (std::size_t i = 0; i < L; ++i) d[perm[k + i]] = 1.0;
      Point z;
      if (model.kind == ModelSet::Kind::sparse)
        z = Point::vector(d);
      else
        z = Point::from_dense(reconstruct(b == 0 ? Matrix::identity(n) : random_orthogonal(rng, n), d));
      if (!in_descent_cone(reg, model, z)) throw NumericError("d_sup_structured: witness left the descent cone");
      best = std::max(best, d_measure_value(model, z));
    }
    out.per_L.push_back(best);
    out.d = std::max(out.d, best);
  }
  return out;
}

// Deterministic lower bound on B_Sigma(R) for weighted l1 on Sigma_k from the
// flat-vector construction: v0 = 1_{H0} maximizing R among size-k supports,
// v1 = 1_{H1} minimizing R among size-(k+L) supports disjoint from H0.
inline double b_witness_bound(const ModelSet& model, const Regularizer& reg) {
  require(model.kind == ModelSet::Kind::sparse && reg.kind == Regularizer::Kind::weighted_l1,
          "b_witness_bound covers weighted l1 on the sparse model");
  check_compatible(reg, model);
  const std::size_t k = model.k, n = model.n;
  require(2 * k < n, "b_witness_bound needs k < n/2");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return reg.weights[i] > reg.weights[j]; });
  std::vector<double> v0(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) v0[order[i]] = 1.0;
  double best = 0.0;
  for (std::size_t L = 1; L + 2 * k <= n; ++L) {
    std::vector<double> v1(n, 0.0);
    for (std::size_t i = 0; i < k + L; ++i) v1[order[n - 1 - i]] = 1.0;
    const Point z = build_descent_vector(reg, Point::vector(v0), Point::vector(v1));
    if (!in_descent_cone(reg, model, z)) throw NumericError("b_witness_bound: witness left the descent cone");
    best = std::max(best, b_measure_value(model, z));
  }
  return best;
}

using SampleMap = std::function<Point(const Point&)>;

struct BEstimate {
  double value = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t samples = 0;
};

namespace detail {

// Point of Sigma with flat (+-1) or Gaussian entries on a random support,
// plus a companion point on a random support (disjoint half of the time).
inline std::pair<Point, Point> construction_pair(const ModelSet& model, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> g;
  const bool flat0 = coin(rng), flat1 = coin(rng), disjoint = coin(rng);
  auto entry = [&](bool flat) { return flat ? (coin(rng) ? 1.0 : -1.0) : g(rng); };

  auto draw_block = [&](std::size_t n, std::size_t k, std::vector<double>& a, std::vector<double>& b,
                        std::size_t offset) {
    const auto s0 = random_subset(rng, n, k);
    std::vector<char> used(n, 0);
    for (auto i : s0) {
      a[offset + i] = entry(flat0);
      used[i] = 1;
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i)
      if (!disjoint || !used[i]) pool.push_back(i);
    if (pool.empty()) return;
    std::uniform_int_distribution<std::size_t> size(1, pool.size());
    const auto pick = random_subset(rng, pool.size(), size(rng));
    for (auto p : pick) b[offset + pool[p]] = entry(flat1);
  };

  if (model.kind == ModelSet::Kind::low_rank_sym) {
    std::vector<double> d0(model.n, 0.0), d1(model.n, 0.0);
    draw_block(model.n, model.k, d0, d1, 0);
    const Matrix u = random_orthogonal(rng, model.n);
    return {Point::from_dense(reconstruct(u, d0)), Point::from_dense(reconstruct(u, d1))};
  }
  std::vector<double> a(model.ambient_dim(), 0.0), b(model.ambient_dim(), 0.0);
  draw_block(model.n, model.k, a, b, 0);
  if (model.kind == ModelSet::Kind::levels) draw_block(model.n2, model.k2, a, b, model.n);
  return {Point::vector(std::move(a)), Point::vector(std::move(b))};
}

}  // namespace detail

// Lower bound on B_Sigma(R): the largest b-measure over sampled members of
// the descent cone. Even sample indices use the v1 - alpha v0 construction,
// odd ones are sphere points kept when they pass the cone test. `map`, when
// set, is applied to every raw draw before it is used.
inline BEstimate b_sup_estimate(const ModelSet& model, const Regularizer& reg, std::uint64_t samples,
                                std::uint64_t seed, std::size_t workers = 1, const SampleMap& map = {}) {
  require(samples >= 1, "b_sup_estimate: samples must be positive");
  check_compatible(reg, model);
  require(reg.kind != Regularizer::Kind::finite_atomic, "b_sup_estimate needs an exact cone test");
  const std::size_t chunks = chunk_count(samples);
  std::vector<double> best(chunks, 0.0);
  std::vector<std::uint64_t> acc(chunks, 0);
  auto apply = [&](const Point& p) { return map ? map(p) : p; };
  parallel_for(chunks, workers, [&](std::size_t c) {
    Rng rng = make_stream(seed, c, 0xB5);
    const std::size_t size = chunk_size(samples, c);
    for (std::size_t i = 0; i < size; ++i) {
      Point z;
      if (i % 2 == 0) {
        auto [v0, v1] = detail::construction_pair(model, rng);
        v0 = apply(v0);
        v1 = apply(v1);
        if (evaluate(reg, v0) <= 0.0) continue;
        z = build_descent_vector(reg, v0, v1);
      } else {
        z = apply(sphere_point(model, rng));
        if (!in_descent_cone(reg, model, z)) continue;
      }
      const auto e = energy_split(secant_model(model), z);
      if (e.head <= 0.0) continue;
      ++acc[c];
      best[c] = std::max(best[c], e.tail / e.head);
    }
  });
  BEstimate out;
  out.samples = samples;
  for (std::size_t c = 0; c < chunks; ++c) {
    out.accepted += acc[c];
    out.value = std::max(out.value, best[c]);
  }
  if (out.accepted == 0) throw NumericError("b_sup_estimate: no sample landed in the descent cone");
  return out;
}

}  // namespace regcomply
