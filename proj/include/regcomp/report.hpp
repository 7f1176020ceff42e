#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "compliance.hpp"
#include "errors.hpp"
#include "levels.hpp"
#include "models.hpp"
#include "regularizers.hpp"

namespace regcomply {

enum class Method { closed_form, structured_search, sampled_lower_bound };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::structured_search: return "structured_search";
    case Method::sampled_lower_bound: return "sampled_lower_bound";
  }
  return {};
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// NaN marks a quantity that the chosen method does not provide.
struct ComplianceReport {
  double delta_nec = kNaN;
  double delta_suff = kNaN;
  double gamma_nec = kNaN;
  double b_value = kNaN;
  double d_value = kNaN;
  Method method = Method::closed_form;
  std::size_t argmax_L = 0;  // closed forms only
};

struct ReportOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t levels_grid = 10000;
};

inline void fill_from_b(ComplianceReport& r) {
  r.delta_nec = 1.0 / (1.0 + 2.0 * r.b_value);
  r.gamma_nec = rip_rc_convert(r.delta_nec, Conversion::rip_to_rc);
}

// B_Sigma for the levels norm: max of B^{L1,L2} over 0 <= L_i <= n_i - 2 k_i.
inline double b_levels_sigma(const ModelSet& model, const LevelsWeights& w, std::size_t grid) {
  require(model.kind == ModelSet::Kind::levels, "b_levels_sigma needs the levels model");
  const std::size_t m1 = model.n >= 2 * model.k ? model.n - 2 * model.k : 0;
  const std::size_t m2 = model.n2 >= 2 * model.k2 ? model.n2 - 2 * model.k2 : 0;
  require(m1 + m2 > 0, "levels model has no room outside the secant supports");
  double best = 0.0;
  for (std::size_t L1 = 0; L1 <= m1; ++L1)
    for (std::size_t L2 = 0; L2 <= m2; ++L2)
      if (L1 + L2 > 0) best = std::max(best, b_levels_oracle(w, model.k, model.k2, L1, L2, grid));
  return best;
}

inline ComplianceReport compliance_report(const ModelSet& model, const Regularizer& reg, const ReportOptions& opt = {}) {
  check_compatible(reg, model);
  require(!model.secant_fills_space(), "the secant set fills the space: no non-invertible operator recovers this model");
  ComplianceReport r;
  if (is_canonical(reg, model)) {
    // l1 on k-sparse vectors and the nuclear norm on rank-r matrices share the
    // same closed forms with k replaced by r.
    const auto bs = b_star_sparse(model.k, model.n);
    r.method = Method::closed_form;
    r.b_value = bs.b;
    r.argmax_L = bs.argmax_L;
    r.d_value = 1.0;
    r.delta_suff = delta_suff_l1(model.k, model.n);
    fill_from_b(r);
    return r;
  }
  if (reg.kind == Regularizer::Kind::levels_l1) {
    r.method = Method::structured_search;
    r.b_value = b_levels_sigma(model, {reg.w1, reg.w2}, opt.levels_grid);
    fill_from_b(r);
    return r;
  }
  require(reg.kind != Regularizer::Kind::finite_atomic, "compliance report needs an exact cone test");
  r.method = Method::sampled_lower_bound;
  r.b_value = b_sup_estimate(model, reg, opt.samples, opt.seed, opt.workers).value;
  if (model.kind == ModelSet::Kind::sparse) r.b_value = std::max(r.b_value, b_witness_bound(model, reg));
  fill_from_b(r);
  return r;
}

}  // namespace regcomply
