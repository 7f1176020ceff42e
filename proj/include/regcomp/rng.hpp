#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "linalg.hpp"
#include "models.hpp"

namespace regcomply {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream, tag). Streams are keyed by chunk, not
// by worker, so the partition of work across threads never changes the draws.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

inline std::size_t default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. Callers write to
// per-index slots and reduce in index order.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline constexpr std::size_t kChunk = 4096;

inline std::size_t chunk_count(std::uint64_t samples) { return static_cast<std::size_t>((samples + kChunk - 1) / kChunk); }

inline std::size_t chunk_size(std::uint64_t samples, std::size_t chunk) {
  const std::uint64_t start = static_cast<std::uint64_t>(chunk) * kChunk;
  return static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, samples - start));
}

inline std::vector<double> gaussian_vector(Rng& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

// Uniform point on the unit sphere of the ambient space of `model`.
inline Point sphere_point(const ModelSet& model, Rng& rng) {
  if (model.kind == ModelSet::Kind::low_rank_sym) {
    // Frobenius-isotropic: off-diagonal packed entries carry half the variance.
    const std::size_t n = model.n;
    std::normal_distribution<double> g;
    std::vector<double> p;
    p.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) p.push_back(i == j ? g(rng) : g(rng) * std::sqrt(0.5));
    Point z = Point::sym(n, std::move(p));
    const double nz = norm(z);
    return nz > 0.0 ? (1.0 / nz) * z : sphere_point(model, rng);
  }
  auto v = gaussian_vector(rng, model.ambient_dim());
  Point z = Point::vector(std::move(v));
  const double nz = norm(z);
  return nz > 0.0 ? (1.0 / nz) * z : sphere_point(model, rng);
}

// Random subset of {0..n-1} of the given size, sorted.
inline std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, std::size_t size) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < size; ++i) {
    std::uniform_int_distribution<std::size_t> u(i, n - 1);
    std::swap(idx[i], idx[u(rng)]);
  }
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Random orthogonal matrix (Gram-Schmidt on a Gaussian matrix).
inline Matrix random_orthogonal(Rng& rng, std::size_t n) {
  Matrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> v;
    double nv = 0.0;
    do {
      v = gaussian_vector(rng, n);
      for (std::size_t p = 0; p < j; ++p) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += v[i] * q(i, p);
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * q(i, p);
      }
      nv = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    } while (nv < 1e-8);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / nv;
  }
  return q;
}

// Unit-norm point of Sigma: random support (per block for levels, random
// eigenbasis for matrices) with Gaussian entries.
inline Point model_sphere_point(const ModelSet& model, Rng& rng) {
  std::normal_distribution<double> g;
  Point p;
  if (model.kind == ModelSet::Kind::low_rank_sym) {
    std::vector<double> d(model.n, 0.0);
    for (std::size_t i = 0; i < model.k; ++i) d[i] = g(rng);
    p = Point::from_dense(reconstruct(random_orthogonal(rng, model.n), d));
  } else {
    std::vector<double> v(model.ambient_dim(), 0.0);
    for (auto i : random_subset(rng, model.n, model.k)) v[i] = g(rng);
    if (model.kind == ModelSet::Kind::levels)
      for (auto i : random_subset(rng, model.n2, model.k2)) v[model.n + i] = g(rng);
    p = Point::vector(std::move(v));
  }
  const double np = norm(p);
  return np > 0.0 ? (1.0 / np) * p : model_sphere_point(model, rng);
}

}  // namespace regcomply
