#pragma once

// JSON and flag-grammar conversions. Requires nlohmann/json on the include path.

#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "models.hpp"
#include "regularizers.hpp"

namespace regcomply::io {

using nlohmann::json;

// Doubles as JSON numbers; +-inf as the strings "inf"/"-inf", NaN as null.
inline json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw ConfigError("expected a number, got " + j.dump());
}

inline json to_json(const Point& p) {
  if (!p.is_matrix()) return p.data;
  return json{{"side", p.side}, {"upper", p.data}};
}

inline Point point_from_json(const json& j) {
  try {
    if (j.is_array()) return Point::vector(j.get<std::vector<double>>());
    if (j.is_object()) return Point::sym(j.at("side").get<std::size_t>(), j.at("upper").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad point: ") + e.what());
  }
  throw ConfigError("a point is an array or {\"side\":n,\"upper\":[...]}");
}

inline json to_json(const ModelSet& m) {
  switch (m.kind) {
    case ModelSet::Kind::sparse: return {{"type", "sparse"}, {"k", m.k}, {"n", m.n}};
    case ModelSet::Kind::low_rank_sym: return {{"type", "lowrank"}, {"r", m.k}, {"n", m.n}};
    case ModelSet::Kind::levels: return {{"type", "levels"}, {"k1", m.k}, {"k2", m.k2}, {"n1", m.n}, {"n2", m.n2}};
  }
  return {};
}

inline json to_json(const Regularizer& r) {
  switch (r.kind) {
    case Regularizer::Kind::weighted_l1: return {{"type", "weighted_l1"}, {"weights", r.weights}};
    case Regularizer::Kind::levels_l1: return {{"type", "levels_l1"}, {"w1", r.w1}, {"w2", r.w2}, {"n1", r.n1}};
    case Regularizer::Kind::nuclear: return {{"type", "nuclear"}};
    case Regularizer::Kind::finite_atomic: {
      json atoms = json::array();
      for (const auto& a : r.atoms) atoms.push_back(to_json(a));
      return {{"type", "finite_atomic"}, {"atoms", atoms}};
    }
  }
  return {};
}

inline Regularizer regularizer_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "weighted_l1") return Regularizer::weighted_l1(j.at("weights").get<std::vector<double>>());
    if (type == "levels_l1")
      return Regularizer::levels_l1(j.at("w1").get<double>(), j.at("w2").get<double>(), j.at("n1").get<std::size_t>());
    if (type == "nuclear") return Regularizer::nuclear();
    if (type == "finite_atomic") {
      std::vector<Point> atoms;
      for (const auto& a : j.at("atoms")) atoms.push_back(point_from_json(a));
      return Regularizer::finite_atomic(std::move(atoms));
    }
    throw ConfigError("unknown regularizer type '" + type + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad regularizer: ") + e.what());
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline std::size_t parse_size(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0) throw ConfigError("");
    return static_cast<std::size_t>(v);
  } catch (...) {
    throw ConfigError("bad integer for " + what + ": '" + s + "'");
  }
}

inline double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("");
    return v;
  } catch (...) {
    throw ConfigError("bad number for " + what + ": '" + s + "'");
  }
}

// "type:key=val,key=val"
inline std::map<std::string, std::string> parse_keyvals(const std::string& body, const std::string& spec) {
  std::map<std::string, std::string> kv;
  if (body.empty()) return kv;
  for (const auto& part : split(body, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in '" + spec + "'");
    kv[part.substr(0, eq)] = part.substr(eq + 1);
  }
  return kv;
}

inline ModelSet parse_model(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') {
    const auto j = json::parse(spec, nullptr, false);
    if (j.is_discarded()) throw ConfigError("model JSON does not parse");
    try {
      const auto type = j.value("type", std::string());
      auto z = [&](const char* key) { return j.at(key).get<std::size_t>(); };
      if (type == "sparse") return ModelSet::sparse(z("k"), z("n"));
      if (type == "lowrank") return ModelSet::low_rank_sym(z("r"), z("n"));
      if (type == "levels") return ModelSet::levels(z("k1"), z("k2"), z("n1"), z("n2"));
      throw ConfigError("unknown model type '" + type + "'");
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad model: ") + e.what());
    }
  }
  const auto colon = spec.find(':');
  const std::string type = spec.substr(0, colon);
  const auto kv = parse_keyvals(colon == std::string::npos ? "" : spec.substr(colon + 1), spec);
  auto get = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("model '" + spec + "' is missing '" + key + "'");
    return parse_size(it->second, key);
  };
  auto expect = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : kv) {
      bool ok = false;
      for (const char* e : keys) ok = ok || k == e;
      if (!ok) throw ConfigError("model '" + spec + "' has unknown key '" + k + "'");
    }
  };
  if (type == "sparse") {
    expect({"k", "n"});
    return ModelSet::sparse(get("k"), get("n"));
  }
  if (type == "lowrank") {
    expect({"r", "n"});
    return ModelSet::low_rank_sym(get("r"), get("n"));
  }
  if (type == "levels") {
    expect({"k1", "k2", "n1", "n2"});
    return ModelSet::levels(get("k1"), get("k2"), get("n1"), get("n2"));
  }
  throw ConfigError("unknown model type '" + type + "' (sparse, lowrank, levels)");
}

// "l1" (canonical norm of the model), "nuclear", "weighted_l1:1,1,4",
// "levels_l1:w1=1,w2=2", or a JSON object.
inline Regularizer parse_regularizer(const std::string& spec, const ModelSet& model) {
  if (!spec.empty() && spec.front() == '{') {
    const auto j = json::parse(spec, nullptr, false);
    if (j.is_discarded()) throw ConfigError("regularizer JSON does not parse");
    return regularizer_from_json(j);
  }
  const auto colon = spec.find(':');
  const std::string type = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (type == "l1") {
    switch (model.kind) {
      case ModelSet::Kind::sparse: return Regularizer::l1(model.n);
      case ModelSet::Kind::levels: return Regularizer::levels_l1(1.0, 1.0, model.n);
      case ModelSet::Kind::low_rank_sym: return Regularizer::nuclear();
    }
  }
  if (type == "nuclear") return Regularizer::nuclear();
  if (type == "weighted_l1") {
    std::vector<double> w;
    for (const auto& s : split(body, ',')) w.push_back(parse_real(s, "weight"));
    return Regularizer::weighted_l1(std::move(w));
  }
  if (type == "levels_l1") {
    const auto kv = parse_keyvals(body, spec);
    auto get = [&](const std::string& key) {
      const auto it = kv.find(key);
      return it == kv.end() ? 1.0 : parse_real(it->second, key);
    };
    return Regularizer::levels_l1(get("w1"), get("w2"), model.n);
  }
  throw ConfigError("unknown regularizer '" + spec + "' (l1, nuclear, weighted_l1:..., levels_l1:..., JSON)");
}

}  // namespace regcomply::io
