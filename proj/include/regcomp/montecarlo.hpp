#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "compliance.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "regularizers.hpp"
#include "rng.hpp"

namespace regcomply {

struct VolumeEstimate {
  double estimate = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // Wilson 95%
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool upper_bound = false;  // true when the sup over x was itself sampled
};

struct Interval {
  double low, high;
};

// Wilson score interval for `hits` successes out of `n`.
inline Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054) {
  require(n >= 1, "wilson_interval: n must be positive");
  const double N = static_cast<double>(n), p = static_cast<double>(hits) / N;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * N)) / (1 + z2 / N);
  const double half = z / (1 + z2 / N) * std::sqrt(p * (1 - p) / N + z2 / (4 * N * N));
  // The endpoints are exact at 0 and n hits.
  return {hits == 0 ? 0.0 : std::max(0.0, center - half), hits == n ? 1.0 : std::min(1.0, center + half)};
}

inline VolumeEstimate make_estimate(std::uint64_t outside, std::uint64_t samples, std::uint64_t seed) {
  VolumeEstimate v;
  v.samples = samples;
  v.seed = seed;
  v.estimate = static_cast<double>(outside) / static_cast<double>(samples);
  const auto ci = wilson_interval(outside, samples);
  v.ci_low = std::min(ci.low, v.estimate);
  v.ci_high = std::max(ci.high, v.estimate);
  return v;
}

inline void require_exact_cone(const Regularizer& reg) {
  require(reg.kind != Regularizer::Kind::finite_atomic, "volume estimates need an exact cone test");
}

// Counts sphere samples accepted by `accept`, chunk by chunk.
template <class Accept>
std::uint64_t count_accepted(const ModelSet& model, std::uint64_t samples, std::uint64_t seed, std::uint64_t tag,
                             std::size_t workers, const SampleMap& map, Accept accept) {
  const std::size_t chunks = chunk_count(samples);
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, workers, [&](std::size_t c) {
    Rng rng = make_stream(seed, c, tag);
    const std::size_t size = chunk_size(samples, c);
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < size; ++i) {
      Point z = sphere_point(model, rng);
      if (map) z = map(z);
      if (accept(z)) ++h;
    }
    hits[c] = h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return total;
}

// A^U = 1 - (fraction of the unit sphere inside T_R(Sigma)).
inline VolumeEstimate estimate_au(const ModelSet& model, const Regularizer& reg, std::uint64_t samples,
                                  std::uint64_t seed, std::size_t workers = 1, const SampleMap& map = {}) {
  require(samples >= 1, "estimate_au: samples must be positive");
  require_exact_cone(reg);
  check_compatible(reg, model);
  const auto in = count_accepted(model, samples, seed, 0xA0, workers, map,
                                 [&](const Point& z) { return in_descent_cone(reg, model, z); });
  return make_estimate(samples - in, samples, seed);
}

// Same estimator with the secant set in place of the descent cone.
inline VolumeEstimate estimate_secant_complement(const ModelSet& model, std::uint64_t samples, std::uint64_t seed,
                                                 std::size_t workers = 1) {
  require(samples >= 1, "samples must be positive");
  const ModelSet sec = secant_model(model);
  const auto in = count_accepted(model, samples, seed, 0xA0, workers, {}, [&](const Point& z) {
    return energy_split(sec, z).tail <= 1e-24 * norm_sq(z);
  });
  return make_estimate(samples - in, samples, seed);
}

// Per-point cone fraction vol(T_R(x) ∩ S)/vol(S).
inline VolumeEstimate point_cone_complement(const ModelSet& model, const Regularizer& reg, const Point& x,
                                            std::uint64_t samples, std::uint64_t seed, std::size_t workers = 1) {
  require(samples >= 1, "samples must be positive");
  const auto in = count_accepted(model, samples, seed, 0xA1, workers, {},
                                 [&](const Point& z) { return descent_direction_test(reg, x, z); });
  return make_estimate(samples - in, samples, seed);
}

// A^NU = 1 - sup_x (fraction inside T_R(x)); the sup runs over sampled x, so
// the result bounds A^NU from above.
inline VolumeEstimate estimate_anu(const ModelSet& model, const Regularizer& reg, std::uint64_t x_samples,
                                   std::uint64_t sphere_samples, std::uint64_t seed, std::size_t workers = 1) {
  require(x_samples >= 1, "estimate_anu: x_samples must be positive");
  require(sphere_samples >= 1, "estimate_anu: sphere_samples must be positive");
  require_exact_cone(reg);
  check_compatible(reg, model);
  VolumeEstimate best;
  bool have = false;
  for (std::uint64_t j = 0; j < x_samples; ++j) {
    Rng rng = make_stream(seed, j, 0xA2);
    const Point x = model_sphere_point(model, rng);
    // Common sphere samples across x keep the comparison paired.
    auto v = point_cone_complement(model, reg, x, sphere_samples, seed, workers);
    if (!have || v.estimate < best.estimate) {
      best = v;
      have = true;
    }
  }
  best.upper_bound = true;
  return best;
}

struct Experiment3dRow {
  double r2 = 1.0, r3 = 1.0;
  VolumeEstimate au;
  std::size_t rank = 0;  // 1 = largest A^U
};

struct Experiment3dResult {
  std::vector<Experiment3dRow> rows;  // sorted by rank
  bool uniform_is_argmax = false;
  double z_margin = 0.0;  // (best - runner-up) / pooled standard error
  // Uniform weights' interval is disjoint from every row at L-inf ratio
  // distance >= 0.5 from (1,1).
  bool separated = false;
};

// A^U of weighted l1 with weights (1, r2, r3) on 1-sparse vectors of R^3.
// Every grid point sees the same sphere samples.
inline Experiment3dResult experiment_3d_1sparse(const std::vector<std::pair<double, double>>& grid,
                                                std::uint64_t samples, std::uint64_t seed, std::size_t workers = 1) {
  require(!grid.empty(), "experiment_3d_1sparse: empty grid");
  for (const auto& [a, b] : grid) require(a > 0.0 && b > 0.0, "experiment_3d_1sparse: ratios must be positive");
  const ModelSet model = ModelSet::sparse(1, 3);
  Experiment3dResult out;
  for (const auto& [a, b] : grid) {
    Experiment3dRow row;
    row.r2 = a;
    row.r3 = b;
    row.au = estimate_au(model, Regularizer::weighted_l1({1.0, a, b}), samples, seed, workers);
    out.rows.push_back(row);
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const auto& x, const auto& y) { return x.au.estimate > y.au.estimate; });
  for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i].rank = i + 1;

  const auto& top = out.rows.front();
  out.uniform_is_argmax = top.r2 == 1.0 && top.r3 == 1.0;
  if (out.rows.size() > 1) {
    const auto& second = out.rows[1];
    const double n = static_cast<double>(samples);
    const double p1 = top.au.estimate, p2 = second.au.estimate;
    const double se = std::sqrt(p1 * (1 - p1) / n + p2 * (1 - p2) / n);
    out.z_margin = se > 0.0 ? (p1 - p2) / se : std::numeric_limits<double>::infinity();
  }
  const Experiment3dRow* uniform = nullptr;
  for (const auto& r : out.rows)
    if (r.r2 == 1.0 && r.r3 == 1.0) uniform = &r;
  out.separated = uniform != nullptr;
  if (uniform)
    for (const auto& r : out.rows) {
      if (std::max(std::abs(r.r2 - 1.0), std::abs(r.r3 - 1.0)) < 0.5) continue;
      if (!(r.au.ci_high < uniform->au.ci_low)) out.separated = false;
    }
  return out;
}

}  // namespace regcomply
