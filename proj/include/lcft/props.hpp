#pragma once
// Sampling checks of the structural properties of tau, the extremal polydiscs
// and the pseudodistance: interior polydiscs (i), the tau comparison (ii),
// engulfing (iii), base-point stability (iv) and the quasi-metric (v).

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcft/parallel.hpp"
#include "lcft/pdist.hpp"

namespace lcft {

struct PropertyReport {
  std::string id;  // "i" .. "v"
  std::string name;
  std::map<std::string, double> constants;       // over all samples
  std::map<std::string, double> half_constants;  // over the first half of the samples
  int samples = 0;
  std::uint64_t seed = 0;
  bool stable = false;  // every constant within factor 2 between half and full sample
  bool pass = false;
  std::string note;
};

inline void to_json(nlohmann::json& j, const PropertyReport& r) {
  j = nlohmann::json{{"id", r.id},           {"name", r.name},     {"constants", r.constants},
                     {"half_constants", r.half_constants}, {"samples", r.samples}, {"seed", r.seed},
                     {"stable", r.stable},   {"pass", r.pass},     {"note", r.note}};
}

struct PropertyOptions {
  double depth_lo = 1e-8;  // base points lie at depth [depth_lo, depth_hi] inside the boundary
  double depth_hi = 1e-2;
  double eps_lo = 1e-8;  // scales are log-uniform in [eps_lo, eps_hi]
  double eps_hi = 1e-3;
  int torus_points = 200;
  std::vector<double> k_values{2.0, 4.0};
  int inclusion_samples = 100;  // engulfing: samples that also compare whole polydiscs
  double sample_scale = 2.0;    // quasi-metric triples are drawn from A P_eps(zeta)
  double local_radius = 0.1;    // ... and kept within this euclidean distance of zeta
  double stability_factor = 2.0;
  BasisOptions basis{16, 1, 150, 1e-3, 64, 0};
  DistanceOptions distance{8, 480, 1, 0.0, BasisOptions{4, 1, 150, 1e-2, 32, 0, 0.1, 1e-5}};
  int threads = 1;
};

namespace detail {

inline Rng sample_rng(std::uint64_t seed, int prop, int i) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                  static_cast<std::uint32_t>(prop), static_cast<std::uint32_t>(i)};
  return Rng(s);
}

inline double log_uniform(double lo, double hi, Rng& rng) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

inline CVec near_boundary_point(const Domain& d, const PropertyOptions& o, Rng& rng) {
  return d.sample_near_boundary(1, o.depth_lo, o.depth_hi, rng)[0];
}

inline BasisOptions seeded(BasisOptions b, std::uint64_t seed, int i) {
  b.seed = seed * 1000003u + static_cast<std::uint64_t>(i);
  return b;
}

/// Point zeta + sum lambda_k v_k with lambda_k uniform in the disc of radius
/// A tau_k (radius 1 for capped directions), kept inside half of W0 and within
/// `max_dist` of zeta.
inline CVec polydisc_point(const Domain& d, const ExtremalBasis& b, double A, Rng& rng,
                           double max_dist = std::numeric_limits<double>::infinity()) {
  double shrink = 1.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    CVec z = b.zeta;
    for (int k = 0; k < b.n(); ++k) {
      const double r = b.capped[static_cast<size_t>(k)] ? 1.0 : A * b.tau[static_cast<size_t>(k)];
      z += random_in_disc(shrink * r, rng) * b.v[static_cast<size_t>(k)];
    }
    if (std::abs(d.value(z)) < 0.5 * d.w0() && (z - b.zeta).norm() <= max_dist) return z;
    if (attempt % 10 == 9) shrink *= 0.5;
  }
  return b.zeta;
}

inline double sym_ratio(double a, double b) {
  if (a == b) return 1.0;
  if (a == 0.0 || b == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(a / b, b / a);
}

inline double inv_tau(const TauResult& t) { return t.capped ? 0.0 : 1.0 / t.tau; }

inline bool within_factor(double a, double b, double f) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) return false;
  return std::max(a / b, b / a) <= f;
}

struct Reduction {
  enum Kind { Min, Max };
  std::string name;
  Kind kind;
  std::vector<double> values;  // per sample; NaN marks "no value"
};

inline double reduce(const Reduction& r, int n) {
  double acc = r.kind == Reduction::Min ? std::numeric_limits<double>::infinity() : 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = r.values[static_cast<size_t>(i)];
    if (std::isnan(v)) continue;
    acc = r.kind == Reduction::Min ? std::min(acc, v) : std::max(acc, v);
  }
  return acc;
}

/// Fills full/half constants and the stability flag; `checked` names the
/// constants that enter the stability test.
inline void finish(PropertyReport& rep, const std::vector<Reduction>& red, const std::vector<std::string>& checked,
                   double factor) {
  rep.stable = true;
  for (const auto& r : red) {
    rep.constants[r.name] = reduce(r, rep.samples);
    rep.half_constants[r.name] = reduce(r, rep.samples / 2);
  }
  for (const auto& name : checked)
    rep.stable = rep.stable && within_factor(rep.constants[name], rep.half_constants[name], factor);
}

inline std::string k_label(double k) {
  const double r = std::round(k);
  return std::abs(k - r) < 1e-12 ? std::to_string(static_cast<long long>(r)) : std::to_string(k);
}

}  // namespace detail

/// (i) c P_{|rho(zeta)|}(zeta) inside D: largest c with every sampled torus point
/// of the polydisc inside, minimized over interior zeta near the boundary.
inline PropertyReport check_property_i(const Domain& d, int samples, std::uint64_t seed, const PropertyOptions& o = {}) {
  PropertyReport rep{"i", "interior polydisc", {}, {}, samples, seed, false, false, ""};
  detail::Reduction c{"c", detail::Reduction::Min, std::vector<double>(static_cast<size_t>(samples))};
  parallel_for(samples, o.threads, [&](int i) {
    Rng rng = detail::sample_rng(seed, 1, i);
    const CVec zeta = detail::near_boundary_point(d, o, rng);
    const double eps = std::abs(d.value(zeta));
    const ExtremalBasis b = extremal_basis(d, zeta, eps, detail::seeded(o.basis, seed, i));
    std::uniform_real_distribution<double> ph(0.0, 2 * std::numbers::pi);
    std::vector<CVec> pts;
    for (int p = 0; p < o.torus_points; ++p) {
      CVec q = CVec::Zero(d.nvars());
      for (int k = 0; k < b.n(); ++k) {
        // the normal coordinate cycles through a phase grid containing 0
        const double th = k == 0 ? 2 * std::numbers::pi * (p % 8) / 8.0 : ph(rng);
        q += std::polar(b.tau[static_cast<size_t>(k)], th) * b.v[static_cast<size_t>(k)];
      }
      pts.push_back(q);
    }
    auto inside = [&](double s) {
      for (const CVec& q : pts)
        if (!(d.value(zeta + s * q) < 0.0)) return false;
      return true;
    };
    double lo = 0.0, hi = 1.0;
    while (inside(hi) && hi < 1e6) lo = hi, hi *= 2.0;
    for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(mid) ? lo : hi) = mid;
    }
    c.values[static_cast<size_t>(i)] = lo;
  });
  detail::finish(rep, {c}, {"c"}, o.stability_factor);
  rep.pass = rep.constants["c"] >= 0.01 && rep.stable;
  return rep;
}

/// (ii) 1/tau(zeta, gamma, eps) against sum_j |a_j| / tau_j with a = Phi gamma;
/// capped radii contribute 1/tau = 0. K is the worst two-sided ratio.
inline PropertyReport check_property_ii(const Domain& d, int samples, std::uint64_t seed, const PropertyOptions& o = {}) {
  PropertyReport rep{"ii", "tau comparison", {}, {}, samples, seed, false, false, ""};
  detail::Reduction K{"K", detail::Reduction::Max, std::vector<double>(static_cast<size_t>(samples))};
  parallel_for(samples, o.threads, [&](int i) {
    Rng rng = detail::sample_rng(seed, 2, i);
    const CVec zeta = detail::near_boundary_point(d, o, rng);
    const double eps = detail::log_uniform(o.eps_lo, o.eps_hi, rng);
    const ExtremalBasis b = extremal_basis(d, zeta, eps, detail::seeded(o.basis, seed, i));
    const CVec g = random_unit_vector(d.nvars(), rng);
    const CVec a = b.Phi * g;
    double rhs = 0.0;
    for (int k = 0; k < b.n(); ++k)
      if (!b.capped[static_cast<size_t>(k)]) rhs += std::abs(a(k)) / b.tau[static_cast<size_t>(k)];
    const double lhs = detail::inv_tau(tau(d, zeta, g, eps));
    K.values[static_cast<size_t>(i)] = detail::sym_ratio(lhs, rhs);
  });
  detail::finish(rep, {K}, {"K"}, o.stability_factor);
  rep.pass = std::isfinite(rep.constants["K"]) && rep.stable;
  return rep;
}

/// (iii) engulfing. c_k / C_k are the extreme ratios tau(zeta, v_j, k eps) / tau_j
/// along the eps-basis directions; incl_c_k / incl_C_k compare the polydiscs
/// P_eps and P_{k eps} themselves on the first `inclusion_samples` samples:
/// incl_c_k P_eps is inside P_{k eps}, which is inside incl_C_k P_eps.
inline PropertyReport check_property_iii(const Domain& d, int samples, std::uint64_t seed, const PropertyOptions& o = {}) {
  PropertyReport rep{"iii", "engulfing", {}, {}, samples, seed, false, false, ""};
  std::vector<detail::Reduction> red;
  std::vector<std::string> checked;
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  for (double k : o.k_values) {
    const std::string l = detail::k_label(k);
    red.push_back({"c_" + l, detail::Reduction::Min, std::vector<double>(static_cast<size_t>(samples), nan)});
    red.push_back({"C_" + l, detail::Reduction::Max, std::vector<double>(static_cast<size_t>(samples), nan)});
    red.push_back({"incl_c_" + l, detail::Reduction::Min, std::vector<double>(static_cast<size_t>(samples), nan)});
    red.push_back({"incl_C_" + l, detail::Reduction::Max, std::vector<double>(static_cast<size_t>(samples), nan)});
    checked.push_back("c_" + l);
    checked.push_back("C_" + l);
  }
  parallel_for(samples, o.threads, [&](int i) {
    Rng rng = detail::sample_rng(seed, 3, i);
    const CVec zeta = detail::near_boundary_point(d, o, rng);
    const double eps = detail::log_uniform(o.eps_lo, o.eps_hi, rng);
    const BasisOptions bo = detail::seeded(o.basis, seed, i);
    const ExtremalBasis b = extremal_basis(d, zeta, eps, bo);
    for (size_t q = 0; q < o.k_values.size(); ++q) {
      const double k = o.k_values[q];
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (int j = 0; j < b.n(); ++j) {
        const TauResult t = tau(d, zeta, b.v[static_cast<size_t>(j)], k * eps);
        const double r = t.capped && b.capped[static_cast<size_t>(j)] ? 1.0 : t.tau / b.tau[static_cast<size_t>(j)];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      red[4 * q].values[static_cast<size_t>(i)] = lo;
      red[4 * q + 1].values[static_cast<size_t>(i)] = hi;
      if (i < o.inclusion_samples) {
        const ExtremalBasis bk = extremal_basis(d, zeta, k * eps, bo, &b);
        // sup of |mu_m| over a polydisc is sum_j |M_mj| radius_j
        auto scale_needed = [](const ExtremalBasis& from, const ExtremalBasis& to) {
          const CMat M = to.Phi * from.Phi.adjoint();
          double A = 0.0;
          for (int m = 0; m < to.n(); ++m) {
            double s = 0.0;
            for (int j = 0; j < from.n(); ++j) s += std::abs(M(m, j)) * from.tau[static_cast<size_t>(j)];
            A = std::max(A, s / to.tau[static_cast<size_t>(m)]);
          }
          return A;
        };
        red[4 * q + 2].values[static_cast<size_t>(i)] = 1.0 / scale_needed(b, bk);
        red[4 * q + 3].values[static_cast<size_t>(i)] = scale_needed(bk, b);
      }
    }
  });
  detail::finish(rep, red, checked, o.stability_factor);
  bool ok = rep.stable;
  for (double k : o.k_values) {
    const std::string l = detail::k_label(k);
    const double c = rep.constants["c_" + l], C = rep.constants["C_" + l];
    ok = ok && c >= 1.0 - 1e-3 && c <= C && C <= k * (1.0 + 1e-3);
  }
  rep.pass = ok;
  rep.note = "pass requires 1 <= c_k <= C_k <= k up to 1e-3; incl_* constants are informational";
  return rep;
}

/// (iv) tau(zeta, gamma, eps) against tau(z, gamma, eps) for z in P_eps(zeta).
inline PropertyReport check_property_iv(const Domain& d, int samples, std::uint64_t seed, const PropertyOptions& o = {}) {
  PropertyReport rep{"iv", "base point stability", {}, {}, samples, seed, false, false, ""};
  detail::Reduction K{"K", detail::Reduction::Max, std::vector<double>(static_cast<size_t>(samples))};
  parallel_for(samples, o.threads, [&](int i) {
    Rng rng = detail::sample_rng(seed, 4, i);
    const CVec zeta = detail::near_boundary_point(d, o, rng);
    const double eps = detail::log_uniform(o.eps_lo, o.eps_hi, rng);
    const ExtremalBasis b = extremal_basis(d, zeta, eps, detail::seeded(o.basis, seed, i));
    const CVec z = detail::polydisc_point(d, b, 1.0, rng);
    const CVec g = random_unit_vector(d.nvars(), rng);
    const TauResult a = tau(d, zeta, g, eps), c = tau(d, z, g, eps);
    K.values[static_cast<size_t>(i)] = detail::sym_ratio(a.tau, c.tau);
  });
  detail::finish(rep, {K}, {"K"}, o.stability_factor);
  rep.pass = rep.constants["K"] <= 16.0 && rep.stable;
  return rep;
}

/// (v) quasi-metric: K_sym = max d(z, zeta) / d(zeta, z) (two-sided) and
/// K_tri = max d(z, zeta) / (d(z, w) + d(w, zeta)) over triples drawn from
/// A P_eps(zeta). d(a, b) is measured with polydiscs centered at a.
inline PropertyReport check_property_v(const Domain& d, int samples, std::uint64_t seed, const PropertyOptions& o = {}) {
  PropertyReport rep{"v", "quasi-metric", {}, {}, samples, seed, false, false, ""};
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  detail::Reduction sym{"K_sym", detail::Reduction::Max, std::vector<double>(static_cast<size_t>(samples), nan)};
  detail::Reduction tri{"K_tri", detail::Reduction::Max, std::vector<double>(static_cast<size_t>(samples), nan)};
  std::vector<int> far(static_cast<size_t>(samples), 0);
  parallel_for(samples, o.threads, [&](int i) {
    Rng rng = detail::sample_rng(seed, 5, i);
    const CVec zeta = detail::near_boundary_point(d, o, rng);
    const double eps = detail::log_uniform(o.eps_lo, o.eps_hi, rng);
    const ExtremalBasis b = extremal_basis(d, zeta, eps, detail::seeded(o.basis, seed, i));
    const CVec z = detail::polydisc_point(d, b, o.sample_scale, rng, o.local_radius);
    const CVec w = detail::polydisc_point(d, b, o.sample_scale, rng, o.local_radius);
    BasisCache cz(d, z, o.distance), cw(d, w, o.distance), czeta(d, zeta, o.distance);
    const DistanceResult d_z_zeta = pseudodistance(cz, zeta), d_zeta_z = pseudodistance(czeta, z);
    const DistanceResult d_z_w = pseudodistance(cz, w), d_w_zeta = pseudodistance(cw, zeta);
    far[static_cast<size_t>(i)] = d_z_zeta.far + d_zeta_z.far + d_z_w.far + d_w_zeta.far;
    if (d_z_zeta.value > 0.0 || d_zeta_z.value > 0.0)
      sym.values[static_cast<size_t>(i)] = detail::sym_ratio(d_z_zeta.value, d_zeta_z.value);
    const double den = d_z_w.value + d_w_zeta.value;
    if (d_z_zeta.value > 0.0) tri.values[static_cast<size_t>(i)] = den > 0.0 ? d_z_zeta.value / den : std::numeric_limits<double>::infinity();
  });
  detail::finish(rep, {sym, tri}, {"K_sym", "K_tri"}, o.stability_factor);
  int nfar = 0;
  for (int f : far) nfar += f;
  rep.constants["far_distances"] = nfar;
  rep.pass = std::isfinite(rep.constants["K_sym"]) && std::isfinite(rep.constants["K_tri"]) && rep.stable;
  return rep;
}

inline std::vector<PropertyReport> check_all_properties(const Domain& d, int samples, std::uint64_t seed,
                                                        const PropertyOptions& o = {}) {
  return {check_property_i(d, samples, seed, o), check_property_ii(d, samples, seed, o),
          check_property_iii(d, samples, seed, o), check_property_iv(d, samples, seed, o),
          check_property_v(d, samples, seed, o)};
}

}  // namespace lcft
