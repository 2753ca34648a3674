#pragma once

// Run configuration (JSON or TOML), JSON serialization of results, and the
// report envelope shared by every command.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "virial/error.hpp"
#include "virial/exact.hpp"
#include "virial/graph.hpp"
#include "virial/kernel.hpp"
#include "virial/numerics.hpp"
#include "virial/oracle.hpp"
#include "virial/potential.hpp"
#include "virial/series.hpp"

namespace virial::io {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

struct Caps {
  int symbolic = kernel::kDefaultSymbolicCap;
  int enumeration = graph::kDefaultEnumerationCap;
  int oracle_N = oracle::kMaxN;
};

struct RunConfig {
  PairPotential pot = PairPotential::hard_core(1.0);
  double beta = 1.0;
  numerics::QuadratureSpec quad;
  Caps caps;
  std::string format = "json";
  std::uint64_t seed = 1;
  json resolved = json::object();   // canonical form, hashed into every report
};

// ---- config parsing -------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(prefix + it.key(), "unknown key");
}

inline double get_number(const json& obj, const std::string& key, const std::string& path, double fallback,
                         bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(path + key, "missing required number");
    return fallback;
  }
  const auto& v = obj.at(key);
  if (v.is_string() && (v == "inf" || v == "+inf")) return kInf;
  if (!v.is_number()) throw ConfigError(path + key, "expected a number");
  return v.get<double>();
}

inline std::int64_t get_integer(const json& obj, const std::string& key, const std::string& path,
                                std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(path + key, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::string get_string(const json& obj, const std::string& key, const std::string& path,
                              const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + key, "expected a string");
  return v.get<std::string>();
}

/// Rethrows module validation errors as config errors naming `key`.
template <class Fn>
auto keyed(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace detail

inline PairPotential potential_from_json(const json& p, const std::string& path = "potential.") {
  using namespace detail;
  if (!p.is_object()) throw ConfigError(path.substr(0, path.size() - 1), "expected a table");
  std::string kind = get_string(p, "kind", path, "hard_core");
  std::replace(kind.begin(), kind.end(), '-', '_');
  const auto dim = static_cast<int>(get_integer(p, "dimension", path, 1));
  if (dim < 1 || dim > 3) throw ConfigError(path + "dimension", "must be 1, 2 or 3");
  if (kind == "ideal") {
    reject_unknown(p, path, {"kind", "dimension"});
    return PairPotential::ideal(dim);
  }
  if (kind == "hard_core") {
    reject_unknown(p, path, {"kind", "dimension", "diameter"});
    const double a = get_number(p, "diameter", path, 1.0);
    return keyed(path + "diameter", [&] { return PairPotential::hard_core(a, dim); });
  }
  if (kind == "square_well") {
    reject_unknown(p, path, {"kind", "dimension", "diameter", "depth", "range"});
    const double a = get_number(p, "diameter", path, 1.0);
    const double eps = get_number(p, "depth", path, 0, true);
    const double r = get_number(p, "range", path, 0, true);
    if (!(a > 0)) throw ConfigError(path + "diameter", "must be positive");
    if (!(eps > 0)) throw ConfigError(path + "depth", "must be positive");
    if (!(r > a)) throw ConfigError(path + "range", "must exceed the diameter");
    return PairPotential::square_well(a, eps, r, dim);
  }
  if (kind == "lennard_jones") {
    reject_unknown(p, path, {"kind", "dimension", "epsilon", "sigma"});
    const double eps = get_number(p, "epsilon", path, 1.0);
    const double sigma = get_number(p, "sigma", path, 1.0);
    if (!(eps > 0)) throw ConfigError(path + "epsilon", "must be positive");
    if (!(sigma > 0)) throw ConfigError(path + "sigma", "must be positive");
    return PairPotential::lennard_jones(eps, sigma, dim);
  }
  if (kind == "tabulated") {
    reject_unknown(p, path, {"kind", "dimension", "steps"});
    if (!p.contains("steps") || !p.at("steps").is_array()) throw ConfigError(path + "steps", "expected an array of [r, phi]");
    std::vector<Step> steps;
    for (std::size_t i = 0; i < p.at("steps").size(); ++i) {
      const auto& s = p.at("steps")[i];
      const std::string key = path + "steps[" + std::to_string(i) + "]";
      if (!s.is_array() || s.size() != 2 || !s[0].is_number()) throw ConfigError(key, "expected [r, phi]");
      double phi;
      if (s[1].is_string() && (s[1] == "inf" || s[1] == "+inf"))
        phi = kInf;
      else if (s[1].is_number())
        phi = s[1].get<double>();
      else
        throw ConfigError(key, "phi must be a number or \"inf\"");
      steps.push_back({s[0].get<double>(), phi});
    }
    return keyed(path + "steps", [&] { return PairPotential::tabulated(steps, dim); });
  }
  throw ConfigError(path + "kind", "unknown potential kind '" + kind + "'");
}

inline json potential_to_json(const PairPotential& pot) {
  std::string kind = to_string(pot.kind());
  std::replace(kind.begin(), kind.end(), '-', '_');
  json j = {{"kind", kind}, {"dimension", pot.dimension()}};
  switch (pot.kind()) {
    case PotentialKind::ideal:
      break;
    case PotentialKind::hard_core:
      j["diameter"] = pot.core();
      break;
    case PotentialKind::square_well:
      j["diameter"] = pot.core();
      j["depth"] = -pot.steps()[1].phi;
      j["range"] = pot.steps()[1].r_upper;
      break;
    case PotentialKind::lennard_jones:
      j["epsilon"] = pot.lj_epsilon();
      j["sigma"] = pot.lj_sigma();
      break;
    case PotentialKind::tabulated: {
      json steps = json::array();
      for (const auto& s : pot.steps()) steps.push_back({s.r_upper, s.phi == kInf ? json("inf") : json(s.phi)});
      j["steps"] = steps;
      break;
    }
  }
  return j;
}

inline json quadrature_to_json(const numerics::QuadratureSpec& q) {
  return {{"mode", numerics::to_string(q.mode)},
          {"order", q.order},
          {"subpanels", q.subpanels},
          {"samples", q.samples},
          {"domain_half_width", q.domain_half_width}};
}

inline RunConfig config_from_json(const json& root) {
  using namespace detail;
  if (!root.is_object()) throw ConfigError("(root)", "configuration must be a table/object");
  reject_unknown(root, "", {"potential", "beta", "quadrature", "caps", "format", "seed"});
  RunConfig c;
  if (root.contains("potential")) c.pot = potential_from_json(root.at("potential"));
  c.beta = get_number(root, "beta", "", 1.0);
  if (!(c.beta > 0) || !std::isfinite(c.beta)) throw ConfigError("beta", "must be a positive finite number");
  const auto seed = get_integer(root, "seed", "", 1);
  if (seed < 0) throw ConfigError("seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.format = get_string(root, "format", "", "json");
  if (c.format != "json" && c.format != "csv") throw ConfigError("format", "must be 'json' or 'csv'");

  c.quad = numerics::QuadratureSpec::for_dimension(c.pot.dimension());
  if (root.contains("quadrature")) {
    const auto& q = root.at("quadrature");
    if (!q.is_object()) throw ConfigError("quadrature", "expected a table");
    reject_unknown(q, "quadrature.", {"mode", "order", "subpanels", "samples", "domain_half_width"});
    const auto mode = get_string(q, "mode", "quadrature.", numerics::to_string(c.quad.mode));
    if (mode == "grid")
      c.quad.mode = numerics::QuadratureSpec::Mode::grid;
    else if (mode == "monte-carlo" || mode == "monte_carlo")
      c.quad.mode = numerics::QuadratureSpec::Mode::monte_carlo;
    else
      throw ConfigError("quadrature.mode", "must be 'grid' or 'monte-carlo'");
    c.quad.order = static_cast<int>(get_integer(q, "order", "quadrature.", c.quad.order));
    if (c.quad.order < 1 || c.quad.order > quadrature::kMaxGaussOrder)
      throw ConfigError("quadrature.order", "must be in [1, 64]");
    c.quad.subpanels = static_cast<int>(get_integer(q, "subpanels", "quadrature.", c.quad.subpanels));
    if (c.quad.subpanels < 1) throw ConfigError("quadrature.subpanels", "must be >= 1");
    const auto samples = get_integer(q, "samples", "quadrature.", static_cast<std::int64_t>(c.quad.samples));
    if (samples <= 0) throw ConfigError("quadrature.samples", "must be > 0");
    c.quad.samples = static_cast<std::uint64_t>(samples);
    c.quad.domain_half_width = get_number(q, "domain_half_width", "quadrature.", 0.0);
    if (c.quad.domain_half_width < 0) throw ConfigError("quadrature.domain_half_width", "must be >= 0");
    if (c.quad.domain_half_width > 0 && c.quad.domain_half_width < c.pot.cutoff(c.beta))
      throw ConfigError("quadrature.domain_half_width", "smaller than the interaction range");
  }
  if (c.quad.mode == numerics::QuadratureSpec::Mode::grid && c.pot.dimension() != 1)
    throw ConfigError("quadrature.mode", "grid quadrature requires dimension 1");
  c.quad.seed = c.seed;

  if (root.contains("caps")) {
    const auto& k = root.at("caps");
    if (!k.is_object()) throw ConfigError("caps", "expected a table");
    reject_unknown(k, "caps.", {"symbolic", "enumeration", "oracle_N"});
    c.caps.symbolic = static_cast<int>(get_integer(k, "symbolic", "caps.", c.caps.symbolic));
    c.caps.enumeration = static_cast<int>(get_integer(k, "enumeration", "caps.", c.caps.enumeration));
    c.caps.oracle_N = static_cast<int>(get_integer(k, "oracle_N", "caps.", c.caps.oracle_N));
    if (c.caps.symbolic < 1 || c.caps.symbolic > 10) throw ConfigError("caps.symbolic", "must be in [1, 10]");
    if (c.caps.enumeration < 1 || c.caps.enumeration > graph::kMaxVertices)
      throw ConfigError("caps.enumeration", "must be in [1, 11]");
    if (c.caps.oracle_N < 1 || c.caps.oracle_N > oracle::kMaxN) throw ConfigError("caps.oracle_N", "must be in [1, 7]");
  }

  c.resolved = {{"potential", potential_to_json(c.pot)},
                {"beta", c.beta},
                {"quadrature", quadrature_to_json(c.quad)},
                {"caps", {{"symbolic", c.caps.symbolic}, {"enumeration", c.caps.enumeration}, {"oracle_N", c.caps.oracle_N}}},
                {"format", c.format},
                {"seed", c.seed}};
  return c;
}

inline json toml_to_json(const toml::node& node) {
  if (auto t = node.as_table()) {
    json j = json::object();
    for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (auto a = node.as_array()) {
    json j = json::array();
    for (auto&& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) {
    const double d = v->get();
    if (std::isinf(d)) return d > 0 ? json("inf") : json("-inf");
    return d;
  }
  if (auto v = node.as_boolean()) return v->get();
  if (auto v = node.as_string()) return v->get();
  throw ConfigError("(toml)", "unsupported TOML value type");
}

inline json parse_config_text(const std::string& text, bool toml_syntax) {
  if (toml_syntax) {
    try {
      return toml_to_json(toml::parse(text));
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << e.description() << " at line " << e.source().begin.line;
      throw ConfigError("(syntax)", msg.str());
    }
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(syntax)", e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return config_from_json(parse_config_text(ss.str(), !is_json));
}

// ---- hashing and envelope -------------------------------------------------

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json envelope(const std::string& command, const RunConfig& cfg, json provenance, json result) {
  return {{"tool", "virial"},
          {"version", kVersion},
          {"command", command},
          {"config", cfg.resolved},
          {"config_hash", fnv1a_hex(cfg.resolved.dump())},
          {"seed", cfg.seed},
          {"provenance", std::move(provenance)},
          {"result", std::move(result)}};
}

inline json error_object(const Error& e) {
  json j = {{"kind", e.kind()}, {"message", e.what()}};
  if (auto c = dynamic_cast<const ConfigError*>(&e)) j["key"] = c->key();
  return {{"error", j}};
}

// ---- serializers ----------------------------------------------------------

inline json to_json(const graph::LabeledGraph& g) {
  json edges = json::array();
  for (auto [i, j] : g.edge_list()) edges.push_back({g.label(i), g.label(j)});
  return {{"white", g.white}, {"black", g.black}, {"edges", edges}};
}

inline json pair_labels(int white, graph::EdgeMask mask) {
  json out = json::array();
  for (graph::EdgeMask e = mask; e; e &= e - 1) {
    auto [i, j] = graph::pair_from_index(std::countr_zero(e));
    out.push_back({kernel::vertex_label(white, i), kernel::vertex_label(white, j)});
  }
  return out;
}

inline json to_json(const kernel::SymbolicKernel& k) {
  json terms = json::array();
  for (const auto& m : k.terms) {
    json t = {{"edges", pair_labels(k.white, m.f_edges)},
              {"numerator", numerator_string(m.coefficient)},
              {"denominator", denominator_string(m.coefficient)}};
    if (m.e_pairs) t["boltzmann_pairs"] = pair_labels(k.white, m.e_pairs);
    terms.push_back(t);
  }
  return {{"white", k.white},
          {"black", k.black},
          {"rho_power", k.rho_power()},
          {"boltzmann_prefactor", k.boltzmann_prefactor},
          {"normalized", k.normalized},
          {"zero", k.is_zero()},
          {"terms", terms}};
}

inline json to_json(const Configuration& eta, int d) {
  json out = json::array();
  for (const auto& p : eta) {
    if (d == 1) {
      out.push_back(p[0]);
    } else {
      json q = json::array();
      for (int k = 0; k < d; ++k) q.push_back(p[k]);
      out.push_back(q);
    }
  }
  return out;
}

inline json to_json(const numerics::Estimate& e) { return {{"value", e.value}, {"error", e.error}}; }

inline json to_json(const numerics::KernelEstimate& k, int d, bool per_graph = true) {
  json j = {{"value", k.value},
            {"error", k.error},
            {"n", k.n},
            {"eta", to_json(k.eta, d)},
            {"method", quadrature_to_json(k.method)},
            {"graphs", k.per_graph.size()}};
  if (per_graph) {
    json rows = json::array();
    for (const auto& c : k.per_graph) rows.push_back({{"graph", to_json(c.graph)}, {"value", c.estimate.value}, {"error", c.estimate.error}});
    j["per_graph"] = rows;
  }
  return j;
}

inline json to_json(const series::CorrelationSeries& s, const series::CorrelationResult& r, double rho, int d) {
  json terms = json::array();
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    const auto& t = s.terms[i];
    terms.push_back({{"order", t.order},
                     {"kernel_hat", t.kernel_hat},
                     {"kernel_hat_error", t.kernel_hat_error},
                     {"coefficient", t.coefficient},
                     {"graphs", t.graphs},
                     {"contribution", r.terms[i]}});
  }
  return {{"eta", to_json(s.eta, d)},
          {"rho", rho},
          {"beta", s.beta},
          {"n_max", s.n_max},
          {"boltzmann_prefactor", s.boltzmann},
          {"value", r.value},
          {"error", r.error},
          {"truncation", "O(rho^" + std::to_string(r.truncation_order) + ")"},
          {"term_ratios", r.term_ratios},
          {"trusted", r.trusted},
          {"terms", terms}};
}

inline json to_json(const oracle::KsResult& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"residual", r.residual},
          {"a_N", r.a_N},
          {"uniform_density", r.uniform_density},
          {"uniform_discrepancy", r.uniform_discrepancy},
          {"panel_width", r.panel_width},
          {"gauss_order", r.gauss_order}};
}

inline json to_json(const oracle::Extrapolation& e) {
  return {{"N", e.N_list},
          {"values", e.values},
          {"limit", e.limit},
          {"a_ratios", e.a_ratios},
          {"a_limit", e.a_limit},
          {"monotone", e.monotone},
          {"last_step", e.last_step}};
}

inline json to_json(const StabilityReport& s) {
  return {{"sizes", s.sizes},
          {"min_ratio_by_size", s.min_ratio_by_size},
          {"min_ratio", s.min_ratio},
          {"B_estimate", s.B_estimate},
          {"instability_signal", s.instability_signal},
          {"trials", s.trials}};
}

}  // namespace virial::io
