#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "regcomp/compliance.hpp"
#include "regcomp/io.hpp"
#include "regcomp/levels.hpp"
#include "regcomp/montecarlo.hpp"
#include "regcomp/oracles.hpp"
#include "regcomp/report.hpp"

namespace regcomply::cli {

using io::json;
using io::number;

inline json tagged(double v, const std::string& method) {
  return {{"value", number(v)}, {"method", std::isnan(v) ? std::string("unavailable") : method}};
}

inline json to_json(const ComplianceReport& r) {
  const std::string m = to_string(r.method);
  json j{{"method", m},
         {"delta_nec", tagged(r.delta_nec, m)},
         {"delta_suff", tagged(r.delta_suff, m)},
         {"gamma_nec", tagged(r.gamma_nec, m)},
         {"b_value", tagged(r.b_value, m)},
         {"d_value", tagged(r.d_value, m)}};
  j["delta_sharp_interval"] = {{"low", number(r.delta_suff)}, {"high", number(r.delta_nec)}, {"method", m}};
  if (r.method == Method::closed_form) j["argmax_L"] = r.argmax_L;
  return j;
}

inline json to_json(const LevelsOptimum& o) {
  const std::string m = "structured_search";
  return {{"nu1_star", tagged(o.nu1_star, m)}, {"ratio", tagged(o.ratio, m)}, {"b_value", tagged(o.b_value, m)},
          {"delta_nec", tagged(o.delta_nec, m)}, {"c1", tagged(o.c1, m)},        {"c2", tagged(o.c2, m)},
          {"grid_size", o.grid_size}};
}

// Volume fractions are Monte Carlo estimates with Wilson intervals.
inline json to_json(const VolumeEstimate& v) {
  const std::string m = "monte_carlo";
  return {{"estimate", tagged(v.estimate, m)},
          {"ci_low", tagged(v.ci_low, m)},
          {"ci_high", tagged(v.ci_high, m)},
          {"samples", v.samples},
          {"seed", v.seed},
          {"upper_bound", v.upper_bound}};
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream s;
  s << "k1,k2,nu1_star,ratio,delta_nec,c1,c2\n";
  for (const auto& r : rows)
    s << r.k1 << ',' << r.k2 << ',' << fmt(r.opt.nu1_star) << ',' << fmt(r.opt.ratio) << ',' << fmt(r.opt.delta_nec)
      << ',' << fmt(r.opt.c1) << ',' << fmt(r.opt.c2) << '\n';
  return s.str();
}

// Two side-by-side heatmaps of log10 C1 and log10 C2 over (k1, k2).
inline std::string sweep_svg(const std::vector<SweepRow>& rows) {
  std::size_t kmin = SIZE_MAX, kmax = 0;
  for (const auto& r : rows) {
    kmin = std::min({kmin, r.k1, r.k2});
    kmax = std::max({kmax, r.k1, r.k2});
  }
  const std::size_t side = rows.empty() ? 0 : kmax - kmin + 1;
  const double cell = std::max(4.0, 400.0 / std::max<std::size_t>(side, 1));
  const double panel = cell * static_cast<double>(side), margin = 50.0;
  auto color = [](double t) {
    // Dark blue to yellow.
    t = std::clamp(t, 0.0, 1.0);
    const double stops[4][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {253, 231, 37}};
    const double x = t * 3.0;
    const int i = std::min(2, static_cast<int>(x));
    const double f = x - i;
    std::ostringstream s;
    s << "rgb(";
    for (int c = 0; c < 3; ++c) s << (c ? "," : "") << static_cast<int>(stops[i][c] + f * (stops[i + 1][c] - stops[i][c]));
    s << ")";
    return s.str();
  };
  std::ostringstream s;
  const double width = 2 * panel + 3 * margin, height = panel + 2 * margin;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int p = 0; p < 2; ++p) {
    double lo = INFINITY, hi = -INFINITY;
    std::vector<double> vals;
    for (const auto& r : rows) {
      const double v = std::log10(std::max(p == 0 ? r.opt.c1 : r.opt.c2, 1e-300));
      vals.push_back(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double x0 = margin + p * (panel + margin), y0 = margin;
    s << "<text x=\"" << x0 << "\" y=\"" << y0 - 20 << "\" font-family=\"sans-serif\" font-size=\"14\">log10 "
      << (p == 0 ? "C1" : "C2") << " [" << fmt(lo).substr(0, 6) << ", " << fmt(hi).substr(0, 6) << "]</text>\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double t = hi > lo ? (vals[i] - lo) / (hi - lo) : 0.5;
      const double x = x0 + cell * static_cast<double>(rows[i].k2 - kmin);
      const double y = y0 + cell * static_cast<double>(kmax - rows[i].k1);
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
        << color(t) << "\"><title>k1=" << rows[i].k1 << " k2=" << rows[i].k2 << " " << fmt(vals[i])
        << "</title></rect>\n";
    }
    s << "<text x=\"" << x0 + panel / 2 << "\" y=\"" << y0 + panel + 30
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">k2</text>\n";
    s << "<text x=\"" << x0 - 30 << "\" y=\"" << y0 + panel / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\">k1</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

struct OracleCheck {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  double max_error = 0.0;
};

// Brute-force validation suite: model norm vs its convex program, levels
// bound vs oracle, support-enumeration conditioning vs the projection formula.
inline std::vector<OracleCheck> run_oracles(std::uint64_t trials, std::uint64_t seed) {
  std::vector<OracleCheck> out;
  {
    OracleCheck c{"model_norm_vs_convex_program"};
    Rng rng = make_stream(seed, 0, 0x01);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
      const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, n))(rng);
      const auto z = gaussian_vector(rng, n);
      const double v = model_norm(ModelSet::sparse(k, n), Point::vector(z));
      const auto br = oracle::model_norm_admm(z, k);
      const double err = std::max({br.lower - v, v - br.upper, br.upper - br.lower, 0.0});
      c.max_error = std::max(c.max_error, err);
      c.violations += err > 1e-6;
      ++c.cases;
    }
    out.push_back(c);
  }
  {
    OracleCheck c{"levels_bound_sandwich"};
    Rng rng = make_stream(seed, 1, 0x02);
    std::uniform_real_distribution<double> lw(std::log(0.2), std::log(5.0));
    for (std::uint64_t t = 0; t < trials; ++t) {
      const LevelsWeights w{std::exp(lw(rng)), std::exp(lw(rng))};
      const std::size_t k1 = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
      const std::size_t k2 = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
      std::size_t L1 = 0, L2 = 0;
      while (L1 + L2 == 0) {
        L1 = std::uniform_int_distribution<std::size_t>(0, 8)(rng);
        L2 = std::uniform_int_distribution<std::size_t>(0, 8)(rng);
      }
      const auto b = b_levels_bound(w, k1, k2, L1, L2);
      const double o = b_levels_oracle(w, k1, k2, L1, L2, 10000);
      double err = std::max({b.lower - 1e-6 - o, o - b.upper - 1e-6, 0.0});
      if (b.exact) err = std::max(err, std::abs(o - b.upper) > 1e-3 ? std::abs(o - b.upper) : 0.0);
      c.max_error = std::max(c.max_error, err);
      c.violations += err > 0.0;
      ++c.cases;
    }
    out.push_back(c);
  }
  {
    OracleCheck c{"conditioning_enumeration_vs_projection"};
    Rng rng = make_stream(seed, 2, 0x03);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
      const std::size_t n = std::uniform_int_distribution<std::size_t>(2 * k + 1, 8)(rng);
      const auto z = gaussian_vector(rng, n);
      const double nz = std::inner_product(z.begin(), z.end(), z.begin(), 0.0);
      Matrix M = Matrix::identity(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) -= z[i] * z[j] / nz;
      const ModelSet model = ModelSet::sparse(k, n);
      const double g1v = restricted_conditioning(model, M);
      const double g2v = gamma_nec_point(model, Point::vector(z));
      const double err = std::abs(g1v - g2v) / std::max(1.0, std::abs(g2v));
      c.max_error = std::max(c.max_error, err);
      c.violations += err > 1e-10;
      ++c.cases;
    }
    out.push_back(c);
  }
  return out;
}

struct Common {
  std::uint64_t seed = 1;
  std::size_t workers = default_workers();
  std::string output;
  std::string format = "json";
};

inline void add_common(CLI::App* sub, Common& c, bool with_rng) {
  if (with_rng) sub->add_option("--seed", c.seed, "RNG seed")->envname("REGCOMP_SEED");
  sub->add_option("--workers", c.workers, "worker threads (results do not depend on it)")
      ->envname("REGCOMP_WORKERS")
      ->check(CLI::PositiveNumber);
  sub->add_option("--output", c.output, "output file (default: stdout)");
  sub->add_option("--format", c.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
}

inline void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw ConfigError("cannot open output file '" + c.output + "'");
  f << text;
}

inline json diagnostic(const std::string& kind, const std::string& message, int code) {
  return {{"error", kind}, {"message", message}, {"exit_code", code}};
}

// Exit codes: 0 success, 1 numeric failure or oracle violation, 2 bad configuration.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compliance measures of convex regularizers for low-dimensional models"};
  app.name("regcomp");
  app.require_subcommand(1);

  Common common;
  std::string model_spec = "sparse:k=1,n=3", reg_spec = "l1";
  std::uint64_t samples = 100000;
  std::size_t grid = 100000, levels_grid = 10000;
  std::size_t k1 = 2, k2 = 2, n1 = 8, n2 = 8, kmin = 2, kmax = 10;
  std::uint64_t anu_x = 0, anu_samples = 10000, trials = 200;
  std::string ratios = "0.5,0.75,1,1.5,2", svg_path;

  auto* comp = app.add_subcommand("compliance", "RIP-based compliance report for a (model, regularizer) pair");
  comp->add_option("--model", model_spec, "model, e.g. sparse:k=2,n=10");
  comp->add_option("--reg", reg_spec, "regularizer, e.g. l1, nuclear, weighted_l1:1,1,4, levels_l1:w1=1,w2=2");
  comp->add_option("--samples", samples, "samples for estimated quantities")->check(CLI::PositiveNumber);
  comp->add_option("--grid", levels_grid, "grid for the levels B oracle")->check(CLI::Range(2, 100000000));
  add_common(comp, common, true);

  auto* ow = app.add_subcommand("optimal-weights", "optimal two-level weights");
  ow->add_option("--k1", k1)->required();
  ow->add_option("--k2", k2)->required();
  ow->add_option("--n1", n1)->required();
  ow->add_option("--n2", n2)->required();
  ow->add_option("--grid", grid, "grid points over nu_1")->check(CLI::Range(1000, 100000000));
  add_common(ow, common, false);

  auto* sw = app.add_subcommand("sweep-levels", "optimal weights over a (k1, k2) square with n_i = 4 k_i");
  sw->add_option("--kmin", kmin);
  sw->add_option("--kmax", kmax);
  sw->add_option("--grid", grid)->check(CLI::Range(1000, 100000000));
  sw->add_option("--svg", svg_path, "also write the log10 C1/C2 heatmap here");
  add_common(sw, common, false);

  auto* mc = app.add_subcommand("mc-volume", "Monte Carlo volume compliance A^U (and optionally A^NU)");
  mc->add_option("--model", model_spec);
  mc->add_option("--reg", reg_spec);
  mc->add_option("--samples", samples)->check(CLI::PositiveNumber);
  mc->add_option("--anu-x", anu_x, "points of Sigma for the A^NU bound (0 = skip)");
  mc->add_option("--anu-samples", anu_samples, "sphere samples per point for A^NU")->check(CLI::PositiveNumber);
  add_common(mc, common, true);

  auto* ex = app.add_subcommand("experiment-3d", "A^U of weighted l1 on 1-sparse vectors of R^3 over a ratio grid");
  ex->add_option("--ratios", ratios, "comma-separated ratio values; the grid is their square");
  ex->add_option("--samples", samples)->check(CLI::PositiveNumber);
  add_common(ex, common, true);

  auto* orc = app.add_subcommand("oracle", "run the brute-force validation suite");
  orc->add_option("--trials", trials)->check(CLI::PositiveNumber);
  add_common(orc, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << diagnostic("config_error", e.what(), 2).dump() << "\n";
    return 2;
  }

  try {
    json doc;
    doc["config"] = {{"seed", common.seed}, {"workers", common.workers}, {"format", common.format},
                     {"output", common.output}};
    if (comp->parsed()) {
      const ModelSet model = io::parse_model(model_spec);
      const Regularizer reg = io::parse_regularizer(reg_spec, model);
      ReportOptions opt{samples, common.seed, common.workers, levels_grid};
      doc["command"] = "compliance";
      doc["config"]["model"] = io::to_json(model);
      doc["config"]["regularizer"] = io::to_json(reg);
      doc["config"]["samples"] = samples;
      doc["config"]["grid"] = levels_grid;
      doc["results"] = to_json(compliance_report(model, reg, opt));
      emit(doc.dump(2) + "\n", common, out);
    } else if (ow->parsed()) {
      doc["command"] = "optimal-weights";
      doc["config"].update({{"k1", k1}, {"k2", k2}, {"n1", n1}, {"n2", n2}, {"grid", grid}});
      doc["results"] = to_json(optimal_weights(k1, k2, n1, n2, grid, common.workers));
      emit(doc.dump(2) + "\n", common, out);
    } else if (sw->parsed()) {
      const auto rows = sweep_levels(kmin, kmax, grid, common.workers);
      if (!svg_path.empty()) {
        std::ofstream f(svg_path);
        if (!f) throw ConfigError("cannot open svg file '" + svg_path + "'");
        f << sweep_svg(rows);
      }
      if (common.format == "svg") {
        emit(sweep_svg(rows), common, out);
      } else if (common.format == "json") {
        doc["command"] = "sweep-levels";
        doc["config"].update({{"kmin", kmin}, {"kmax", kmax}, {"grid", grid}, {"n_factor", 4}});
        json arr = json::array();
        for (const auto& r : rows) {
          json row = to_json(r.opt);
          row["k1"] = r.k1;
          row["k2"] = r.k2;
          arr.push_back(row);
        }
        doc["results"] = arr;
        emit(doc.dump(2) + "\n", common, out);
      } else {
        emit(sweep_csv(rows), common, out);
      }
      if (common.format == "json") return 0;
    } else if (mc->parsed()) {
      const ModelSet model = io::parse_model(model_spec);
      const Regularizer reg = io::parse_regularizer(reg_spec, model);
      const auto au = estimate_au(model, reg, samples, common.seed, common.workers);
      doc["command"] = "mc-volume";
      doc["config"]["model"] = io::to_json(model);
      doc["config"]["regularizer"] = io::to_json(reg);
      doc["config"].update({{"samples", samples}, {"anu_x", anu_x}, {"anu_samples", anu_samples}});
      doc["results"]["au"] = to_json(au);
      VolumeEstimate anu;
      if (anu_x > 0) {
        anu = estimate_anu(model, reg, anu_x, anu_samples, common.seed, common.workers);
        doc["results"]["anu_upper"] = to_json(anu);
      }
      if (common.format == "csv") {
        std::ostringstream s;
        s << "quantity,estimate,ci_low,ci_high,samples,seed\n";
        s << "au," << fmt(au.estimate) << ',' << fmt(au.ci_low) << ',' << fmt(au.ci_high) << ',' << au.samples << ','
          << au.seed << '\n';
        if (anu_x > 0)
          s << "anu_upper," << fmt(anu.estimate) << ',' << fmt(anu.ci_low) << ',' << fmt(anu.ci_high) << ','
            << anu.samples << ',' << anu.seed << '\n';
        emit(s.str(), common, out);
      } else {
        emit(doc.dump(2) + "\n", common, out);
      }
    } else if (ex->parsed()) {
      std::vector<double> vals;
      for (const auto& s : io::split(ratios, ',')) vals.push_back(io::parse_real(s, "ratio"));
      std::vector<std::pair<double, double>> g;
      for (double a : vals)
        for (double b : vals) g.emplace_back(a, b);
      const auto res = experiment_3d_1sparse(g, samples, common.seed, common.workers);
      if (common.format == "csv") {
        std::ostringstream s;
        s << "rank,r2,r3,estimate,ci_low,ci_high\n";
        for (const auto& r : res.rows)
          s << r.rank << ',' << fmt(r.r2) << ',' << fmt(r.r3) << ',' << fmt(r.au.estimate) << ',' << fmt(r.au.ci_low)
            << ',' << fmt(r.au.ci_high) << '\n';
        emit(s.str(), common, out);
      } else {
        doc["command"] = "experiment-3d";
        doc["config"].update({{"ratios", vals}, {"samples", samples}});
        json arr = json::array();
        for (const auto& r : res.rows) {
          json row = to_json(r.au);
          row["r2"] = r.r2;
          row["r3"] = r.r3;
          row["rank"] = r.rank;
          arr.push_back(row);
        }
        doc["results"] = {{"rows", arr},
                          {"uniform_is_argmax", res.uniform_is_argmax},
                          {"z_margin", number(res.z_margin)},
                          {"separated", res.separated}};
        emit(doc.dump(2) + "\n", common, out);
      }
    } else if (orc->parsed()) {
      const auto checks = run_oracles(trials, common.seed);
      doc["command"] = "oracle";
      doc["config"]["trials"] = trials;
      json arr = json::array();
      bool ok = true;
      for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"cases", c.cases}, {"violations", c.violations}, {"max_error", c.max_error}});
        ok = ok && c.violations == 0;
      }
      doc["results"] = {{"checks", arr}, {"passed", ok}};
      emit(doc.dump(2) + "\n", common, out);
      return ok ? 0 : 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << diagnostic("config_error", e.what(), 2).dump() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << diagnostic("numeric_failure", e.what(), 1).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << diagnostic("numeric_failure", e.what(), 1).dump() << "\n";
    return 1;
  }
}

}  // namespace regcomply::cli
