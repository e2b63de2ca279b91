#pragma once
// Scenario runner: configs (TOML or JSON) naming a domain, an experiment kind,
// parameters and a seed; reports are schema-versioned JSON plus optional CSV.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gsl/gsl_fit.h>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "lcft/holder.hpp"
#include "lcft/props.hpp"
#include "lcft/support.hpp"

namespace lcft::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline const std::set<std::string> kKinds{"contact", "slice", "support-verify", "tau-scan",
                                          "basis",   "dist",  "props",          "holder"};

/// Experiment failed a property check: exit status 2 rather than 1.
struct Outcome {
  json report;
  std::string csv;  // empty when the experiment has no table
  bool pass = true;
};

struct Scenario {
  json config;  // canonical config: domain, kind, params, seed, output
  std::string kind;
  std::uint64_t seed = 0;
  std::string output;
  std::string config_hash;
};

namespace detail {

inline json toml_to_json(const toml::node& n) {
  if (auto t = n.as_table()) {
    json j = json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (auto a = n.as_array()) {
    json j = json::array();
    for (const auto& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (auto v = n.as_string()) return v->get();
  if (auto v = n.as_integer()) return v->get();
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_boolean()) return v->get();
  throw Error("config: unsupported TOML value type");
}

/// 64-bit FNV-1a, hex.
inline std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

inline cplx to_cplx(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw DomainError("expected a number or [re, im], got " + v.dump());
}

/// Vector from [c1, c2, ...] (numbers or [re, im]) or the labels "e<k>" / "i*e<k>".
inline CVec to_vec(const json& v, int n) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    cplx f = 1.0;
    if (s.rfind("i*", 0) == 0) f = cplx(0, 1), s = s.substr(2);
    if (s.size() < 2 || s[0] != 'e') throw DomainError("unknown vector label '" + v.get<std::string>() + "'");
    const int k = std::stoi(s.substr(1));
    if (k < 1 || k > n) throw DimensionError("vector label '" + v.get<std::string>() + "' out of range");
    return f * unit(n, k - 1);
  }
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw DimensionError("expected a vector with " + std::to_string(n) + " entries, got " + v.dump());
  CVec out(n);
  for (int k = 0; k < n; ++k) out(k) = to_cplx(v[static_cast<size_t>(k)]);
  return out;
}

inline json from_vec(const CVec& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v(k).real(), v(k).imag()});
  return a;
}

inline std::string label(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

inline DomainConfig domain_config(const json& j) {
  if (j.is_string()) return builtin_domain_config(j.get<std::string>());
  if (!j.is_object()) throw DomainError("domain must be a builtin name or a table");
  DomainConfig c = j.contains("builtin") ? builtin_domain_config(j["builtin"].get<std::string>()) : DomainConfig{};
  if (j.contains("name")) c.name = j["name"];
  if (j.contains("defining")) c.defining = j["defining"];
  if (j.contains("m")) c.m = j["m"];
  if (j.contains("nvars")) c.nvars = j["nvars"];
  if (j.contains("w0")) c.w0 = j["w0"];
  if (j.contains("rmax")) c.rmax = j["rmax"];
  if (j.contains("sample_radius")) c.sample_radius = j["sample_radius"];
  if (j.contains("bbox")) c.bbox = j["bbox"].get<std::vector<double>>();
  auto list = [](const json& a) {
    std::vector<cplx> v;
    for (const auto& x : a) v.push_back(to_cplx(x));
    return v;
  };
  if (j.contains("anchor")) c.anchor = list(j["anchor"]);
  if (j.contains("reference")) c.reference = list(j["reference"]);
  if (c.defining.empty()) throw DomainError("domain needs 'builtin' or 'defining'");
  return c;
}

inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double c0, c1, cov00, cov01, cov11, sumsq;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  return c1;
}

template <class T>
T param(const json& p, const char* key, T fallback) {
  return p.contains(key) ? p[key].get<T>() : fallback;
}

}  // namespace detail

/// Parses TOML (by extension .toml) or JSON text; errors carry line/column or byte offsets.
inline json parse_config_text(const std::string& text, bool is_toml) {
  if (is_toml) {
    try {
      return detail::toml_to_json(toml::parse(text));
    } catch (const toml::parse_error& e) {
      const auto& b = e.source().begin;
      throw Error("config: " + std::string(e.description()) + " at line " + std::to_string(b.line) + ", column " +
                  std::to_string(b.column));
    }
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
}

inline json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const bool is_toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  return parse_config_text(ss.str(), is_toml);
}

/// Validates a config and applies overrides; the hash covers the canonical
/// config including the effective seed.
inline Scenario make_scenario(json config, std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (!config.is_object()) throw Error("config must be a table");
  for (const auto& [k, v] : config.items())
    if (k != "domain" && k != "kind" && k != "params" && k != "seed" && k != "output")
      throw Error("config: unknown key '" + k + "'");
  if (!config.contains("kind")) throw Error("config: missing 'kind'");
  if (!config.contains("domain")) throw Error("config: missing 'domain'");
  Scenario s;
  s.kind = config["kind"].get<std::string>();
  if (!kKinds.count(s.kind)) throw Error("config: unknown experiment kind '" + s.kind + "'");
  if (seed_override) config["seed"] = *seed_override;
  if (!config.contains("seed")) throw Error("config: missing 'seed'");
  const json& sj = config["seed"];
  if (!sj.is_number_unsigned() && !(sj.is_number_integer() && sj.get<std::int64_t>() >= 0))
    throw Error("config: 'seed' must be a nonnegative integer");
  s.seed = config["seed"].get<std::uint64_t>();
  if (!config.contains("params")) config["params"] = json::object();
  s.output = config.value("output", std::string());
  s.config = config;
  s.config_hash = detail::fnv1a(config.dump());
  return s;
}

namespace experiments {

inline Outcome contact(const Domain& d, const json& p) {
  const int n = d.nvars();
  const CVec zeta = p.contains("zeta") ? detail::to_vec(p["zeta"], n) : CVec::Zero(n);
  json dirs = p.value("directions", json::array());
  if (dirs.empty())
    for (int k = 2; k <= n; ++k) dirs.push_back("e" + std::to_string(k));
  json orders = json::object(), exceptional = json::object(), imag = json::object();
  for (const auto& g : dirs) {
    const CVec gamma = detail::to_vec(g, n);
    const std::string key = detail::label(g);
    orders[key] = to_json(complex_line_order(d, zeta, gamma));
    imag[key] = to_json(real_line_order(d, zeta, cplx(0, 1) * gamma, 0.0));
    json lines = json::array();
    for (const ExceptionalLine& l : exceptional_real_lines(d, zeta, gamma))
      lines.push_back({{"theta", l.theta}, {"real_order", to_json(l.real_order)}});
    exceptional[key] = lines;
  }
  return {{{"orders", orders}, {"imaginary_direction_orders", imag}, {"exceptional_lines", exceptional}}, "", true};
}

inline Outcome slice(const Domain& d, const json& p) {
  const int n = d.nvars();
  const CVec zeta = p.contains("zeta") ? detail::to_vec(p["zeta"], n) : CVec::Zero(n);
  const CVec t = detail::to_vec(p.at("t"), n);
  const SliceTaylor st = slice_taylor(make_slice(d, zeta, t));
  json norms = json::object();
  for (int j = 1; j <= st.max_degree(); ++j)
    if (st.norm(j) != 0.0) norms[std::to_string(j)] = st.norm(j);
  return {{{"zeta", detail::from_vec(zeta)}, {"t", detail::from_vec(t)}, {"norms", norms}}, "", true};
}

inline Outcome support_verify(const Domain& d, const json& p, std::uint64_t seed, int threads) {
  const int n = d.nvars();
  const double eps_corr = detail::param(p, "eps_corr", 0.1);
  const double radius = detail::param(p, "radius", 0.3);
  const int samples = detail::param(p, "samples", 10000);
  const std::string which = detail::param<std::string>(p, "sign", "both");
  json slices = p.value("slices", json::array());
  if (slices.empty())
    for (int k = 2; k <= n; ++k) slices.push_back("e" + std::to_string(k));
  std::vector<SignChoice> signs;
  if (which == "paper" || which == "both") signs.push_back(SignChoice::Paper);
  if (which == "flipped" || which == "both") signs.push_back(SignChoice::Flipped);
  if (signs.empty()) throw DomainError("support-verify: sign must be paper, flipped or both");
  const CVec zeta = CVec::Zero(n);
  json per_sign = json::object(), passed = json::array();
  for (SignChoice s : signs) {
    const SupportData sd = leray_decompose(pluriharmonic_support(d, zeta, eps_corr, s));
    json est = json::object();
    bool all = true;
    for (const auto& t : slices) {
      const EstimateReport r = verify_est1(sd, d, detail::to_vec(t, n), radius, samples, seed);
      est[detail::label(t)] = r;
      all = all && r.pass;
    }
    json block{{"S", to_expression(sd.S)},
               {"leray_Q", json::array()},
               {"leray_exact", leray_residual(sd).is_zero()},
               {"est1", est},
               {"pass", all}};
    for (const auto& q : sd.Q) block["leray_Q"].push_back(to_expression(q));
    if (all) passed.push_back(to_string(s));
    per_sign[to_string(s)] = block;
  }
  json out{{"eps_corr", eps_corr}, {"signs", per_sign}, {"passing_signs", passed}};
  bool pass = !passed.empty();
  if (detail::param(p, "lemmas", false)) {
    SupportCheckOptions o;
    o.threads = threads;
    const SupportData sd = leray_decompose(pluriharmonic_support(d, zeta, eps_corr, signs.front()));
    const auto grid = p.value("eps_grid", std::vector<double>{1e-2, 1e-3, 1e-4});
    const EstimateReport es = verify_lemma_ES(sd, d, detail::param(p, "es_samples", 20), grid, seed, o);
    json eq = json::object();
    for (double e : grid) eq[std::to_string(e)] = verify_lemma_EQ(sd, d, zeta, e, detail::param(p, "eq_samples", 200), seed, o);
    out["lemma_ES"] = es;
    out["lemma_EQ"] = eq;
  }
  return {out, "", pass};
}

inline Outcome tau_scan(const Domain& d, const json& p) {
  const int n = d.nvars();
  const CVec zeta = p.contains("zeta") ? detail::to_vec(p["zeta"], n) : CVec::Zero(n);
  const CVec gamma = detail::to_vec(p.value("gamma", json("e1")), n);
  const double lo = detail::param(p, "eps_min", 1e-8), hi = detail::param(p, "eps_max", 1e-2);
  const int points = detail::param(p, "points", 13);
  if (points < 2 || !(lo > 0.0 && hi > lo)) throw DomainError("tau-scan: need points >= 2 and 0 < eps_min < eps_max");
  std::ostringstream csv;
  csv.precision(17);
  csv << "eps,tau,capped\n";
  std::vector<double> x, y;
  for (int i = 0; i < points; ++i) {
    const double eps = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
    const TauResult t = tau(d, zeta, gamma, eps);
    csv << eps << ',' << t.tau << ',' << (t.capped ? 1 : 0) << '\n';
    if (!t.capped) x.push_back(std::log(eps)), y.push_back(std::log(t.tau));
  }
  json out{{"gamma", detail::from_vec(gamma)}, {"points", points}};
  out["slope"] = x.size() >= 2 ? json(detail::slope(x, y)) : json(nullptr);
  return {out, csv.str(), true};
}

inline Outcome basis(const Domain& d, const json& p, std::uint64_t seed) {
  const int n = d.nvars();
  const CVec zeta = p.contains("zeta") ? detail::to_vec(p["zeta"], n) : CVec::Zero(n);
  BasisOptions o;
  o.seed = seed;
  const ExtremalBasis b = extremal_basis(d, zeta, detail::param(p, "eps", 1e-6), o);
  json v = json::array();
  for (const CVec& x : b.v) v.push_back(detail::from_vec(x));
  return {{{"eps", b.eps}, {"v", v}, {"tau", b.tau}, {"capped", b.capped}}, "", true};
}

inline Outcome dist(const Domain& d, const json& p, std::uint64_t seed) {
  const int n = d.nvars();
  const CVec zeta = p.contains("zeta") ? detail::to_vec(p["zeta"], n) : CVec::Zero(n);
  DistanceOptions o;
  o.basis.seed = seed;
  o.refine_rel = detail::param(p, "refine_rel", 0.0);
  json points = p.at("points"), out = json::array();
  BasisCache cache(d, zeta, o);
  for (const auto& z : points) {
    const DistanceResult r = pseudodistance(cache, detail::to_vec(z, n));
    out.push_back({{"z", z}, {"d", r.value}, {"far", r.far}, {"below_grid", r.below_grid}});
  }
  return {{{"zeta", detail::from_vec(zeta)}, {"distances", out}}, "", true};
}

inline Outcome props(const Domain& d, const json& p, std::uint64_t seed, int threads) {
  PropertyOptions o;
  o.threads = threads;
  if (p.contains("refine_rel")) o.distance.refine_rel = p["refine_rel"];
  if (p.contains("local_radius")) o.local_radius = p["local_radius"];
  const std::vector<PropertyReport> reps = check_all_properties(d, detail::param(p, "samples", 200), seed, o);
  json blocks = json::array();
  bool pass = true;
  for (const auto& r : reps) {
    blocks.push_back(r);
    pass = pass && r.pass;
  }
  return {{{"properties", blocks}}, "", pass};
}

inline Outcome holder(const Domain& d, const json& p, std::uint64_t seed, int threads) {
  const int n = d.nvars();
  ParseOptions po;
  po.nvars = n;
  const CxPolynomial f = parse_polynomial(p.at("function").get<std::string>(), po);
  HolderOptions o;
  o.threads = threads;
  o.eps_h = detail::param(p, "eps_h", 0.1);
  o.n_bases = detail::param(p, "bases", 100);
  if (p.contains("direction")) o.direction = detail::to_vec(p["direction"], n);
  if (p.contains("base_center")) o.base_center = detail::to_vec(p["base_center"], n);
  o.base_radius = detail::param(p, "base_radius", 0.0);
  const HolderSample s =
      sample_holder_pairs(d, [&](const CVec& z) { return f.eval(as_span(z)); }, detail::param(p, "pairs", 2000), seed, o);
  json est = json::array();
  for (double mu : p.value("mu", std::vector<double>{0.25})) est.push_back(holder_estimate(s, mu));
  std::string csv;
  if (detail::param(p, "csv", false)) {
    std::ostringstream c;
    c.precision(17);
    c << "index,close,dh,d,euclid\n";
    for (const HolderPair& q : s.pairs) c << q.index << ',' << q.close << ',' << q.dh << ',' << q.d << ',' << q.euclid << '\n';
    csv = c.str();
  }
  return {{{"function", p["function"]}, {"estimates", est}, {"note", "lower bounds: maxima over sampled pairs"}}, csv,
          true};
}

}  // namespace experiments

/// Runs one scenario; the report embeds the schema version, config hash and seed.
inline Outcome run_scenario(const Scenario& s, int threads = 1) {
  const DomainConfig dc = detail::domain_config(s.config.at("domain"));
  const Domain d = Domain::from_config(dc);
  const json& p = s.config.at("params");
  Outcome o;
  if (s.kind == "contact") o = experiments::contact(d, p);
  else if (s.kind == "slice") o = experiments::slice(d, p);
  else if (s.kind == "support-verify") o = experiments::support_verify(d, p, s.seed, threads);
  else if (s.kind == "tau-scan") o = experiments::tau_scan(d, p);
  else if (s.kind == "basis") o = experiments::basis(d, p, s.seed);
  else if (s.kind == "dist") o = experiments::dist(d, p, s.seed);
  else if (s.kind == "props") o = experiments::props(d, p, s.seed, threads);
  else o = experiments::holder(d, p, s.seed, threads);
  o.report = json{{"schema", kSchemaVersion},
                  {"kind", s.kind},
                  {"domain", {{"name", dc.name}, {"defining", dc.defining}, {"m", dc.m}}},
                  {"config_hash", s.config_hash},
                  {"seed", s.seed},
                  {"pass", o.pass},
                  {"result", o.report}};
  return o;
}

inline json list_domains() {
  json out = json::array();
  for (const auto& b : builtin_domains())
    out.push_back({{"name", b.config.name},
                   {"defining", b.config.defining},
                   {"m", b.config.m},
                   {"description", b.description},
                   {"expected", b.expected}});
  return out;
}

/// JSON Schema of the report envelope.
inline json report_schema() {
  return json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "lcft report",
  "type": "object",
  "required": ["schema", "kind", "domain", "config_hash", "seed", "pass", "result"],
  "additionalProperties": false,
  "properties": {
    "schema": {"const": 1},
    "kind": {"enum": ["contact", "slice", "support-verify", "tau-scan", "basis", "dist", "props", "holder"]},
    "domain": {
      "type": "object",
      "required": ["name", "defining", "m"],
      "properties": {"name": {"type": "string"}, "defining": {"type": "string"}, "m": {"type": "integer", "minimum": 1}}
    },
    "config_hash": {"type": "string", "pattern": "^[0-9a-f]{16}$"},
    "seed": {"type": "integer", "minimum": 0},
    "pass": {"type": "boolean"},
    "result": {"type": "object"}
  }
})");
}

}  // namespace lcft::cli
