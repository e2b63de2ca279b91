#pragma once
// Sampled lower bound of the nonisotropic Hoelder norm
// sup |h(z0) - h(z1)| / max{d(z0, z1)^mu, |z0 - z1|^{1 - eps_h}}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcft/props.hpp"

namespace lcft {

using SampledFunction = std::function<cplx(const CVec&)>;

struct HolderOptions {
  double eps_h = 0.1;
  int n_bases = 100;            // pair i uses base point i mod n_bases
  double depth_lo = 1e-6;       // every point lies at depth >= depth_lo
  double depth_hi = 1e-2;       // base point depth, log-uniform in [depth_lo, depth_hi]
  double close_eps_hi = 1e-2;   // close pairs: z1 in P_eps(z0), eps uniform in (0, close_eps_hi]
  double far_radius = 0.3;      // far pairs: z1 uniform in the euclidean ball around z0
  std::optional<CVec> direction;  // close pairs along z0 + lambda u, |lambda| <= tau(z0, u, eps)
  std::optional<CVec> base_center;  // base points from boundary points near this center ...
  double base_radius = 0.0;         // ... within this radius (domain sampling region when unset)
  DistanceOptions distance{8, 480, 1, 0.0, BasisOptions{4, 1, 150, 1e-2, 32, 0, 0.1, 1e-5}};
  bool keep_pairs = false;
  int threads = 1;
};

struct HolderPair {
  int index = 0;
  bool close = false;
  double dh = 0.0;      // |h(z0) - h(z1)|
  double d = 0.0;       // d(z0, z1)
  double euclid = 0.0;  // |z0 - z1|
  CVec z0, z1;
};

/// Sampled pairs, reusable for several exponents.
struct HolderSample {
  std::vector<HolderPair> pairs;
  std::uint64_t seed = 0;
  double eps_h = 0.0;
};

struct HolderEstimate {
  double mu = 0.0;
  double eps_h = 0.0;
  double C_h = 0.0;  // lower bound: max over the sampled pairs
  std::pair<CVec, CVec> argmax_pair;
  int npairs = 0;
  std::uint64_t seed = 0;
  double d_branch_fraction = 0.0;
  double euclid_branch_fraction = 0.0;
  std::vector<double> ratios;  // per pair, filled when keep_pairs
};

inline void to_json(nlohmann::json& j, const HolderEstimate& e) {
  auto vec = [](const CVec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v(k).real(), v(k).imag()});
    return a;
  };
  j = nlohmann::json{{"mu", e.mu},
                     {"eps_h", e.eps_h},
                     {"C_h", e.C_h},
                     {"lower_bound", true},
                     {"argmax_pair", {vec(e.argmax_pair.first), vec(e.argmax_pair.second)}},
                     {"npairs", e.npairs},
                     {"seed", e.seed},
                     {"d_branch_fraction", e.d_branch_fraction},
                     {"euclid_branch_fraction", e.euclid_branch_fraction}};
}

namespace detail {

inline std::string point_string(const CVec& z) {
  std::ostringstream s;
  s.precision(17);
  s << '(';
  for (Eigen::Index k = 0; k < z.size(); ++k) s << (k ? ", " : "") << z(k).real() << (z(k).imag() < 0 ? "" : "+") << z(k).imag() << 'i';
  s << ')';
  return s.str();
}

inline cplx eval_checked(const SampledFunction& h, const CVec& z) {
  cplx v;
  try {
    v = h(z);
  } catch (const std::exception& e) {
    throw Error("h evaluation failed at " + point_string(z) + ": " + e.what());
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error("h evaluation is not finite at " + point_string(z));
  return v;
}

inline bool deep_enough(const Domain& d, const CVec& z, double depth_lo) { return d.value(z) <= -depth_lo; }

}  // namespace detail

/// Pairs alternate close (even index) and far (odd index). Pair i only depends on
/// (seed, i) and on earlier pairs of the same base point, so a sample with more
/// pairs extends a sample with fewer.
inline HolderSample sample_holder_pairs(const Domain& d, const SampledFunction& h, int npairs, std::uint64_t seed,
                                        const HolderOptions& o = {}) {
  if (!(o.eps_h > 0.0 && o.eps_h < 1.0)) throw DomainError("holder_norm: eps_h must lie in (0, 1)");
  if (npairs < 0 || o.n_bases <= 0) throw DomainError("holder_norm: counts must be positive");
  const int nb = std::min(o.n_bases, std::max(npairs, 1));
  std::vector<CVec> bases(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    Rng rng = detail::sample_rng(seed, 501, b);
    CVec z;
    for (int a = 0; a < 100; ++a) {
      const CVec p = o.base_center ? d.sample_boundary(*o.base_center, o.base_radius, 1, rng)[0] : d.sample_boundary(1, rng)[0];
      z = p - detail::log_uniform(2.0 * o.depth_lo, o.depth_hi, rng) * d.unit_normal(p);
      if (detail::deep_enough(d, z, o.depth_lo)) break;
    }
    bases[static_cast<size_t>(b)] = z;
  }
  HolderSample out{std::vector<HolderPair>(static_cast<size_t>(npairs)), seed, o.eps_h};
  parallel_for(nb, o.threads, [&](int b) {
    const CVec& z0 = bases[static_cast<size_t>(b)];
    BasisCache cache(d, z0, o.distance);
    const cplx h0 = detail::eval_checked(h, z0);
    for (int i = b; i < npairs; i += nb) {
      Rng rng = detail::sample_rng(seed, 502, i);
      HolderPair& p = out.pairs[static_cast<size_t>(i)];
      p.index = i;
      p.close = i % 2 == 0;
      p.z0 = z0;
      p.z1 = z0;
      for (int a = 0; a < 200; ++a) {
        CVec c;
        if (p.close) {
          const double eps = o.close_eps_hi * (1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng));
          if (o.direction) {
            const CVec u = o.direction->normalized();
            c = z0 + random_in_disc(tau(d, z0, u, eps).tau, rng) * u;
          } else {
            const int k = std::clamp(static_cast<int>(std::lround(-o.distance.steps_per_octave * std::log2(eps))), 0,
                                     o.distance.max_index);
            c = detail::polydisc_point(d, cache.at_index(k), 1.0, rng);
          }
        } else {
          c = z0 + random_in_ball(d.nvars(), o.far_radius, rng);
        }
        if (detail::deep_enough(d, c, o.depth_lo) && (c - z0).norm() > 0.0 && std::abs(d.value(c)) < d.w0()) {
          p.z1 = c;
          break;
        }
      }
      p.dh = std::abs(detail::eval_checked(h, p.z1) - h0);
      p.euclid = (p.z1 - z0).norm();
      if (p.euclid > 0.0) p.d = pseudodistance(cache, p.z1).value;
    }
  });
  return out;
}

/// Estimate over the first `n` pairs of the sample (all when n < 0).
/// d_branch_only drops the euclidean term of the max (diagnostic, not the norm).
inline HolderEstimate holder_estimate(const HolderSample& s, double mu, int n = -1, bool keep_pairs = false,
                                      bool d_branch_only = false) {
  if (!(mu > 0.0)) throw DomainError("holder_norm: mu must be positive");
  const int total = static_cast<int>(s.pairs.size());
  n = n < 0 ? total : std::min(n, total);
  HolderEstimate est{mu, s.eps_h, 0.0, {}, n, s.seed, 0.0, 0.0, {}};
  int nd = 0, ne = 0;
  for (int i = 0; i < n; ++i) {
    const HolderPair& p = s.pairs[static_cast<size_t>(i)];
    double ratio = 0.0;
    if (p.euclid > 0.0) {
      const double db = std::pow(p.d, mu), eb = d_branch_only ? 0.0 : std::pow(p.euclid, 1.0 - s.eps_h);
      (db >= eb ? nd : ne) += 1;
      ratio = p.dh / std::max(db, eb);
    }
    if (keep_pairs) est.ratios.push_back(ratio);
    if (ratio > est.C_h || i == 0) {
      est.C_h = std::max(est.C_h, ratio);
      est.argmax_pair = {p.z0, p.z1};
    }
  }
  if (nd + ne > 0) {
    est.d_branch_fraction = static_cast<double>(nd) / (nd + ne);
    est.euclid_branch_fraction = static_cast<double>(ne) / (nd + ne);
  }
  return est;
}

inline HolderEstimate holder_norm(const Domain& d, const SampledFunction& h, double mu, int npairs, std::uint64_t seed,
                                  const HolderOptions& o = {}) {
  if (!(mu > 0.0)) throw DomainError("holder_norm: mu must be positive");
  return holder_estimate(sample_holder_pairs(d, h, npairs, seed, o), mu, -1, o.keep_pairs);
}

}  // namespace lcft
