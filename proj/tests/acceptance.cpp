// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "regcomp/compliance.hpp"
#include "regcomp/levels.hpp"
#include "regcomp/montecarlo.hpp"
#include "regcomp/oracles.hpp"
#include "regcomp/report.hpp"

using namespace regcomply;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.ok) o.detail = why;
  o.ok = false;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// 1. delta_suff closed form for the sparse and low-rank models.
Outcome delta_suff_closed_form() {
  Outcome o;
  std::size_t cases = 0;
  for (std::size_t n = 3; n <= 64; ++n)
    for (std::size_t k = 1; 2 * k < n; ++k) {
      for (const auto& [m, reg] : {std::pair{ModelSet::sparse(k, n), Regularizer::l1(n)},
                                   std::pair{ModelSet::low_rank_sym(k, n), Regularizer::nuclear()}}) {
        const auto r = compliance_report(m, reg);
        ++cases;
        if (r.method != Method::closed_form || std::abs(r.delta_suff - kInvSqrt2) > 1e-12)
          fail(o, "delta_suff off at " + to_string(m));
      }
    }
  if (o.ok) o.detail = std::to_string(cases) + " (model, n) pairs";
  return o;
}

// 2. delta_nec closed form against exhaustive witnesses and the sampled bound.
std::vector<double> criterion2_estimates(std::size_t workers) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::size_t n = 2 * k + 1; n <= 12; ++n)
      out.push_back(b_sup_estimate(ModelSet::sparse(k, n), Regularizer::l1(n), 100000, 1, workers).value);
  return out;
}

Outcome delta_nec_closed_form(std::vector<double>& estimates) {
  Outcome o;
  double worst = 0.0, gap_15 = 0.0;
  std::size_t idx = 0;
  estimates = criterion2_estimates(1);
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::size_t n = 2 * k + 1; n <= 12; ++n, ++idx) {
      const double b = b_star_sparse(k, n).b;
      const double ex = oracle::b_witness_exhaustive(k, n);
      worst = std::max(worst, std::abs(b - ex));
      if (std::abs(b - ex) > 1e-12) fail(o, fmt("closed form %.15g vs witnesses %.15g", b, ex));
      if (estimates[idx] > b + 1e-12) fail(o, fmt("estimate %.15g exceeds %.15g", estimates[idx], b));
      if (k == 1 && n == 5) gap_15 = b - estimates[idx];
    }
  if (gap_15 > 5e-3) fail(o, fmt("k=1,n=5 estimate is %.3g below the closed form", gap_15));
  if (o.ok) o.detail = fmt("max |closed - exhaustive| = %.2g, k=1,n=5 gap = %.2g", worst, gap_15);
  return o;
}

// 3. Restricted conditioning by support enumeration against the projection formula.
Outcome conditioning_consistency() {
  Outcome o;
  Rng rng = make_stream(3, 0, 0xC3);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + t % 2;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2 * k + 1, 8)(rng);
    const auto z = gaussian_vector(rng, n);
    double nz = 0.0;
    for (double v : z) nz += v * v;
    Matrix M = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) M(i, j) -= z[i] * z[j] / nz;
    const auto m = ModelSet::sparse(k, n);
    const double a = restricted_conditioning(m, M), b = gamma_nec_point(m, Point::vector(z));
    const double err = std::abs(a - b) / std::max(1.0, b);
    worst = std::max(worst, err);
    if (err > 1e-10) fail(o, fmt("enumeration %.15g vs formula %.15g", a, b));
  }
  const double s = std::sqrt(2.0);
  const double g = rip_rc_convert(kInvSqrt2, Conversion::rip_to_rc);
  if (std::abs(g - (s + 1) / (s - 1)) > 1e-12 || std::abs(g - (4 + 3 * s) / s) > 1e-12)
    fail(o, fmt("conversion gives %.15g", g));
  if (o.ok) o.detail = fmt("max relative error %.2g, gamma(1/sqrt2) = %.12g", worst, g);
  return o;
}

// 4. Model norm against the convex program, plus the two norm identities.
Outcome model_norm_oracle() {
  Outcome o;
  Rng rng = make_stream(4, 0, 0xC4);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, n))(rng);
    const auto z = gaussian_vector(rng, n);
    const auto m = ModelSet::sparse(k, n);
    const double v = model_norm(m, Point::vector(z));
    const auto br = oracle::model_norm_admm(z, k);
    const double err = std::max({br.lower - v, v - br.upper, br.upper - br.lower, 0.0});
    worst = std::max(worst, err);
    if (err > 1e-6) fail(o, fmt("norm %.12g outside [%.12g, %.12g]", v, br.lower, br.upper));
    double l1 = 0.0;
    for (double x : z) l1 += std::abs(x);
    if (v * v < l1 * l1 / double(k) - 1e-9) fail(o, "squared norm below l1^2/k");
    const Point p = project_model(m, Point::vector(z));
    if (std::abs(model_norm(m, p) - norm(p)) > 1e-9) fail(o, "norm differs from Euclidean on the model");
  }
  if (o.ok) o.detail = fmt("max bracket violation or width %.2g", worst);
  return o;
}

// 5. D values from the structured witnesses.
Outcome d_values() {
  Outcome o;
  std::size_t cases = 0;
  for (std::size_t n = 3; n <= 20; ++n)
    for (std::size_t k = 1; 2 * k < n; ++k) {
      const auto p = d_sup_structured(ModelSet::sparse(k, n), Regularizer::l1(n), 2);
      if (std::abs(p.d - 1.0) > 1e-9) fail(o, "D != 1 at " + to_string(ModelSet::sparse(k, n)));
      for (std::size_t L = 1; L <= p.per_L.size(); ++L)
        if (std::abs(p.per_L[L - 1] - std::min(1.0, double(L) / double(k))) > 1e-9)
          fail(o, "profile off at " + to_string(ModelSet::sparse(k, n)));
      ++cases;
    }
  for (std::size_t r = 1; r <= 2; ++r)
    for (std::size_t n = 2 * r + 1; n <= 8; ++n) {
      const auto p = d_sup_structured(ModelSet::low_rank_sym(r, n), Regularizer::nuclear(), 4);
      if (std::abs(p.d - 1.0) > 1e-9) fail(o, "nuclear D off at " + to_string(ModelSet::low_rank_sym(r, n)));
      for (std::size_t L = 1; L <= p.per_L.size(); ++L)
        if (std::abs(p.per_L[L - 1] - std::min(1.0, double(L) / double(r))) > 1e-9)
          fail(o, "nuclear profile off at " + to_string(ModelSet::low_rank_sym(r, n)));
      ++cases;
    }
  if (o.ok) o.detail = std::to_string(cases) + " instances";
  return o;
}

// 6. Levels oracle inside the closed-form sandwich. Cases run through the
// worker pool so the determinism criterion can compare worker counts.
std::vector<double> criterion6_values(std::size_t workers, std::vector<LevelsBound>* bounds) {
  struct Case {
    LevelsWeights w;
    std::size_t k1, k2, L1, L2;
  };
  Rng rng = make_stream(6, 0, 0xC6);
  std::uniform_real_distribution<double> lw(std::log(0.2), std::log(5.0));
  std::uniform_int_distribution<std::size_t> kd(1, 6), ld(0, 8);
  std::vector<Case> cases;
  while (cases.size() < 1000) {
    Case c{{std::exp(lw(rng)), std::exp(lw(rng))}, kd(rng), kd(rng), ld(rng), ld(rng)};
    if (c.L1 + c.L2 > 0) cases.push_back(c);
  }
  std::vector<double> out(cases.size());
  if (bounds) bounds->resize(cases.size());
  parallel_for(cases.size(), workers, [&](std::size_t i) {
    const auto& c = cases[i];
    out[i] = b_levels_oracle(c.w, c.k1, c.k2, c.L1, c.L2, 10000);
    if (bounds) (*bounds)[i] = b_levels_bound(c.w, c.k1, c.k2, c.L1, c.L2);
  });
  return out;
}

Outcome levels_sandwich(std::vector<double>& values) {
  Outcome o;
  std::vector<LevelsBound> bounds;
  values = criterion6_values(1, &bounds);
  std::size_t exact = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& b = bounds[i];
    if (values[i] < b.lower - 1e-6 || values[i] > b.upper + 1e-6)
      fail(o, fmt("oracle %.12g outside [%.12g, %.12g]", values[i], b.lower, b.upper));
    if (b.exact) {
      ++exact;
      worst_gap = std::max(worst_gap, std::abs(values[i] - b.upper));
      if (std::abs(values[i] - b.upper) > 1e-3) fail(o, fmt("exact case off by %.3g", values[i] - b.upper));
    }
  }
  if (o.ok) o.detail = std::to_string(exact) + " exact cases, max |oracle - upper| there " + fmt("%.2g", worst_gap);
  return o;
}

// 7. Optimal levels weights against the reference weights.
Outcome levels_optimum_sweep() {
  Outcome o;
  const auto rows = sweep_levels(2, 50, 1000000, default_workers());
  double c1 = 0.0, c2 = 0.0;
  for (const auto& r : rows) {
    c1 = std::max(c1, r.opt.c1);
    c2 = std::max(c2, r.opt.c2);
    if (r.opt.c1 > 1e-5 || r.opt.c2 > 5e-3)
      fail(o, "k1=" + std::to_string(r.k1) + " k2=" + std::to_string(r.k2) + fmt(": C1 %.3g C2 %.3g", r.opt.c1, r.opt.c2));
  }
  if (o.ok) o.detail = std::to_string(rows.size()) + " pairs, " + fmt("max C1 %.3g, max C2 %.3g", c1, c2);
  return o;
}

// 8. Uniform weights maximize the volume measure on 1-sparse vectors of R^3.
Experiment3dResult criterion8_run(std::size_t workers) {
  const std::vector<double> r{0.5, 0.75, 1, 1.5, 2};
  std::vector<std::pair<double, double>> grid;
  for (double a : r)
    for (double b : r) grid.emplace_back(a, b);
  return experiment_3d_1sparse(grid, 1000000, 1, workers);
}

Outcome uniform_optimality(Experiment3dResult& res) {
  Outcome o;
  res = criterion8_run(1);
  if (!res.uniform_is_argmax) fail(o, fmt("argmax at (%.3g, %.3g)", res.rows[0].r2, res.rows[0].r3));
  if (!res.separated) fail(o, "uniform interval overlaps a distant grid point");
  if (o.ok)
    o.detail = fmt("A^U(1,1) = %.6f, runner-up (%.3g, ", res.rows[0].au.estimate, res.rows[1].r2) +
               fmt("%.3g) = %.6f, z = %.3g", res.rows[1].r3, res.rows[1].au.estimate, res.z_margin);
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, double limit, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      fail(o, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit) fail(o, fmt("took %.1f s, limit %.0f s", secs, limit));
    failures += !o.ok;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  std::vector<double> est2, val6;
  Experiment3dResult res8;
  report(1, "delta_suff closed form", 1, delta_suff_closed_form);
  report(2, "delta_nec closed form vs witnesses", 30, [&] { return delta_nec_closed_form(est2); });
  report(3, "conditioning consistency", 1e9, conditioning_consistency);
  report(4, "model norm oracle equivalence", 60, model_norm_oracle);
  report(5, "D values", 10, d_values);
  report(6, "levels sandwich", 120, [&] { return levels_sandwich(val6); });
  report(7, "optimal levels weights sweep", 600, levels_optimum_sweep);
  report(8, "uniform weights optimal in 3D", 300, [&] { return uniform_optimality(res8); });
  report(9, "determinism across worker counts", 1e9, [&] {
    Outcome o;
    if (criterion2_estimates(4) != est2) fail(o, "criterion 2 estimates differ");
    if (criterion6_values(4, nullptr) != val6) fail(o, "criterion 6 values differ");
    const auto r4 = criterion8_run(4);
    bool same = r4.rows.size() == res8.rows.size() && r4.z_margin == res8.z_margin;
    for (std::size_t i = 0; same && i < r4.rows.size(); ++i)
      same = r4.rows[i].r2 == res8.rows[i].r2 && r4.rows[i].r3 == res8.rows[i].r3 &&
             r4.rows[i].au.estimate == res8.rows[i].au.estimate && r4.rows[i].au.ci_low == res8.rows[i].au.ci_low &&
             r4.rows[i].au.ci_high == res8.rows[i].au.ci_high;
    if (!same) fail(o, "criterion 8 table differs");
    if (o.ok) o.detail = "criteria 2, 6, 8 bit-identical for 1 and 4 workers";
    return o;
  });
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
