#pragma once
// Holomorphic support functions: the pluriharmonic support of rigid model
// domains, the slice estimate verifier, the Leray decomposition and the
// sampling checks of the support and Leray section bounds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcft/contact.hpp"
#include "lcft/props.hpp"
#include "lcft/slices.hpp"

namespace lcft {

/// Sign of the correction eps * sigma_k z_k^{d_k}. Paper: sigma = -1 for
/// d = 0 mod 4 and +1 otherwise, so Re(sigma z^d) <= 0 on the imaginary axis.
enum class SignChoice { Paper, Flipped };

inline const char* to_string(SignChoice s) { return s == SignChoice::Paper ? "paper" : "flipped"; }

struct SupportData {
  CVec zeta;
  CxPolynomial S;              // holomorphic in z, S(zeta) = 0
  std::vector<CxPolynomial> Q;  // Leray coefficients, empty until leray_decompose
  double eps_corr = 0.0;
  std::vector<int> signs;  // sigma_k per variable, 0 where no correction
  std::vector<int> orders;  // complex contact order d_k per variable, 0 where none
};

struct EstimateReport {
  std::string op;
  double min_margin = 0.0;
  CVec worst_point;
  std::map<std::string, double> fitted_constants;
  int nsamples = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  std::string note;
};

inline void to_json(nlohmann::json& j, const EstimateReport& r) {
  nlohmann::json wp = nlohmann::json::array();
  for (Eigen::Index k = 0; k < r.worst_point.size(); ++k)
    wp.push_back({r.worst_point(k).real(), r.worst_point(k).imag()});
  j = nlohmann::json{{"op", r.op},
                     {"constants", r.fitted_constants},
                     {"min_margin", r.min_margin},
                     {"worst_point", wp},
                     {"nsamples", r.nsamples},
                     {"seed", r.seed},
                     {"pass", r.pass},
                     {"note", r.note}};
}

namespace detail {

/// rho - Im z1 split into per-variable parts p_k(z_k); throws unless rho is a
/// rigid model: Im z1 plus a sum over k >= 2 of functions of z_k alone, each
/// separable as f_k(Re z_k) + g_k(Im z_k).
inline std::vector<CxPolynomial> rigid_parts(const Domain& d) {
  const int n = d.nvars();
  CxPolynomial rest = d.rho().inner();
  Monomial m1(n), mb1(n);
  m1.alpha(0) = 1;
  mb1.beta(0) = 1;
  rest.add_term(m1, cplx(0, 0.5));
  rest.add_term(mb1, cplx(0, -0.5));
  std::vector<CxPolynomial> parts(static_cast<size_t>(n), CxPolynomial(n));
  for (const auto& [m, c] : rest.terms()) {
    int var = -1;
    for (int j = 0; j < n; ++j) {
      if (m.alpha(j) == 0 && m.beta(j) == 0) continue;
      if (var >= 0) throw DomainError("not a rigid model: mixed term " + to_string(m));
      var = j;
    }
    if (var <= 0) throw DomainError("not a rigid model: term " + to_string(m) + " is constant or involves z1");
    parts[static_cast<size_t>(var)].add_term(m, c);
  }
  const double probes[][2] = {{0.3, 0.7}, {-0.5, 0.2}, {0.9, -0.4}, {-0.15, -0.6}};
  for (int k = 1; k < n; ++k) {
    const CxPolynomial& p = parts[static_cast<size_t>(k)];
    const double scale = std::max(1.0, p.norm());
    for (const auto& xy : probes) {
      CVec a = CVec::Zero(n), b = a, c = a;
      a(k) = {xy[0], xy[1]};
      b(k) = xy[0];
      c(k) = {0.0, xy[1]};
      const cplx defect = p.eval(as_span(a)) - p.eval(as_span(b)) - p.eval(as_span(c));
      if (std::abs(defect) > 1e-12 * scale)
        throw DomainError("not a rigid model: part in z" + std::to_string(k + 1) + " mixes Re and Im");
    }
  }
  return parts;
}

}  // namespace detail

/// S(z) = -i z1 + eps_corr sum_k sigma_k z_k^{d_k} at zeta = 0 of a rigid model.
inline SupportData pluriharmonic_support(const Domain& d, const CVec& zeta, double eps_corr,
                                         SignChoice sign = SignChoice::Paper) {
  const int n = d.nvars();
  if (zeta.size() != n) throw DimensionError("pluriharmonic_support: dimension mismatch");
  if (zeta.norm() > 1e-14) throw DomainError("pluriharmonic_support: only zeta = 0 is supported");
  if (!(eps_corr >= 0.0)) throw DomainError("pluriharmonic_support: eps_corr must be nonnegative");
  detail::rigid_parts(d);
  SupportData sd{zeta, CxPolynomial(n), {}, eps_corr, std::vector<int>(static_cast<size_t>(n), 0),
                 std::vector<int>(static_cast<size_t>(n), 0)};
  Monomial m1(n);
  m1.alpha(0) = 1;
  sd.S.add_term(m1, cplx(0, -1));
  for (int k = 1; k < n; ++k) {
    const ContactOrder o = complex_line_order(d, zeta, unit(n, k));
    if (o.infinite()) continue;
    int sigma = o.value % 4 == 0 ? -1 : 1;
    if (sign == SignChoice::Flipped) sigma = -sigma;
    sd.orders[static_cast<size_t>(k)] = o.value;
    sd.signs[static_cast<size_t>(k)] = sigma;
    Monomial mk(n);
    mk.alpha(k) = o.value;
    sd.S.add_term(mk, sigma * eps_corr);
  }
  return sd;
}

/// S(z) = 2 sum_j d rho/d z_j(zeta) (z_j - zeta_j): Re S is the real linearization
/// of rho at zeta, a support function for convex rho.
inline SupportData linear_support(const Domain& d, const CVec& zeta) {
  const int n = d.nvars();
  if (zeta.size() != n) throw DimensionError("linear_support: dimension mismatch");
  const CVec g = d.dz(zeta);
  SupportData sd{zeta, CxPolynomial(n), {}, 0.0, std::vector<int>(static_cast<size_t>(n), 0),
                 std::vector<int>(static_cast<size_t>(n), 0)};
  cplx c0 = 0.0;
  for (int j = 0; j < n; ++j) {
    Monomial m(n);
    m.alpha(j) = 1;
    sd.S.add_term(m, 2.0 * g(j));
    c0 -= 2.0 * g(j) * zeta(j);
  }
  sd.S.add_term(Monomial(n), c0);
  return sd;
}

/// Largest eps' in {2^-i, i = 0..20} with r - eps' sum_j ||P^j|| |w2|^j - Re S >= -1e-12
/// on `nsamples` points of the bidisc |w1|, |w2| <= radius of the slice at sd.zeta.
inline EstimateReport verify_est1(const SupportData& sd, const Domain& d, const CVec& t, double radius, int nsamples,
                                  std::uint64_t seed) {
  if (!sd.S.is_holomorphic()) throw DomainError("verify_est1: S must be holomorphic");
  const Slice s = make_slice(d, sd.zeta, t);
  const SliceTaylor st = slice_taylor(s);
  std::vector<double> A(static_cast<size_t>(nsamples)), B(A.size());
  std::vector<CVec> pts(A.size());
  for (int i = 0; i < nsamples; ++i) {
    Rng rng = detail::sample_rng(seed, 101, i);
    const cplx w1 = random_in_disc(radius, rng), w2 = random_in_disc(radius, rng);
    const CVec z = s.point(w1, w2);
    const std::vector<cplx> w{w1, w2};
    double b = 0.0;
    for (int j = 2; j <= std::min(2 * d.m(), st.max_degree()); ++j) b += st.norm(j) * std::pow(std::abs(w2), j);
    A[static_cast<size_t>(i)] = s.r_slice.eval(w) - sd.S.eval(as_span(z)).real();
    B[static_cast<size_t>(i)] = b;
    pts[static_cast<size_t>(i)] = z;
  }
  EstimateReport rep{"est1", 0.0, sd.zeta, {}, nsamples, seed, false, ""};
  auto min_at = [&](double ep, CVec& where) {
    double mn = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < A.size(); ++i) {
      const double m = A[i] - ep * B[i];
      if (m < mn) mn = m, where = pts[i];
    }
    return mn;
  };
  double eps_prime = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double ep = std::ldexp(1.0, -i);
    CVec where;
    const double mn = min_at(ep, where);
    if (mn >= -1e-12) {
      eps_prime = ep;
      rep.min_margin = mn;
      rep.worst_point = where;
      break;
    }
  }
  rep.pass = eps_prime > 0.0;
  if (!rep.pass) {
    rep.min_margin = min_at(0.0, rep.worst_point);
    rep.note = "no eps' down to 2^-20 keeps the margin nonnegative";
  }
  rep.fitted_constants["eps_prime"] = eps_prime;
  rep.fitted_constants["margin_at_zero"] = [&] {
    CVec w;
    return min_at(0.0, w);
  }();
  return rep;
}

/// Telescoping division S = sum_j Q_j (z_j - zeta_j) in index order; Q_j does not
/// depend on z_1..z_{j-1}.
inline SupportData leray_decompose(SupportData sd) {
  const int n = sd.S.nvars();
  if (sd.zeta.size() != n) throw DimensionError("leray_decompose: dimension mismatch");
  if (!sd.S.is_holomorphic()) throw DomainError("leray_decompose: S must be holomorphic");
  const double tol = 1e-12 * std::max(1.0, sd.S.norm());
  if (std::abs(sd.S.eval(as_span(sd.zeta))) > tol) throw DomainError("leray_decompose: S(zeta) != 0");
  sd.Q.assign(static_cast<size_t>(n), CxPolynomial(n));
  CxPolynomial T = sd.S;
  for (int j = 0; j < n; ++j) {
    const cplx zj = sd.zeta(j);
    CxPolynomial next(n);
    for (const auto& [m, c] : T.terms()) {
      Monomial r = m;
      r.alpha(j) = 0;
      cplx p = c;
      for (int e = 0; e < m.alpha(j); ++e) p *= zj;
      next.add_term(r, p);
    }
    // (T - next) vanishes on z_j = zeta_j; divide each z_j-column by (z_j - zeta_j)
    std::map<Monomial, std::map<int, cplx>, GradedLex> cols;
    const CxPolynomial diff = T - next;
    for (const auto& [m, c] : diff.terms()) {
      Monomial r = m;
      r.alpha(j) = 0;
      cols[r][m.alpha(j)] += c;
    }
    for (const auto& [rest, col] : cols) {
      const int deg = col.rbegin()->first;
      cplx q = 0.0;
      for (int e = deg; e >= 1; --e) {
        auto it = col.find(e);
        q = (it == col.end() ? cplx(0.0) : it->second) + zj * q;
        Monomial out = rest;
        out.alpha(j) = e - 1;
        sd.Q[static_cast<size_t>(j)].add_term(out, q);
      }
      auto it0 = col.find(0);
      const cplx rem = (it0 == col.end() ? cplx(0.0) : it0->second) + zj * q;
      if (std::abs(rem) > tol) throw DomainError("leray_decompose: division leaves a remainder");
    }
    T = std::move(next);
  }
  return sd;
}

/// sum_j Q_j (z_j - zeta_j) - S as a term map.
inline CxPolynomial leray_residual(const SupportData& sd) {
  const int n = sd.S.nvars();
  CxPolynomial r = CxPolynomial(n) - sd.S;
  for (int j = 0; j < static_cast<int>(sd.Q.size()); ++j)
    r += sd.Q[static_cast<size_t>(j)] *
         (CxPolynomial::variable(n, j) - CxPolynomial::constant(n, sd.zeta(j)));
  return r;
}

struct SupportCheckOptions {
  double shell_C = 2.0;      // outer scale of the shell C P_eps minus (1/2) P_eps
  double depth_lo = 1e-3;    // |rho(z)| / eps drawn log-uniform in [depth_lo, 1]
  int attempts_per_sample = 40;
  double eq_box = 1.0;       // |w_k|, |eta_k| <= eq_box tau_k
  int fd_points = 100;
  BasisOptions basis{4, 1, 150, 1e-2, 32, 0, 0.1, 1e-5};
  int threads = 1;
};

namespace detail {

inline bool in_scaled(const ExtremalBasis& b, double A, const CVec& z) {
  return polydisc_contains(b, A, z).contained;
}

/// Point of the shell A_out P minus A_in P around b.zeta (uniform in the
/// coordinate polydisc, rejected inside the inner polydisc).
inline CVec shell_point(const ExtremalBasis& b, double A_in, double A_out, Rng& rng) {
  for (;;) {
    CVec z = b.zeta;
    double worst = 0.0;
    for (int k = 0; k < b.n(); ++k) {
      const double r = b.capped[static_cast<size_t>(k)] ? 1.0 : b.tau[static_cast<size_t>(k)];
      const cplx l = random_in_disc(A_out * r, rng);
      worst = std::max(worst, std::abs(l) / r);
      z += l * b.v[static_cast<size_t>(k)];
    }
    if (worst > A_in) return z;
  }
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace detail

/// Empirical constants of |S(z, zeta)| >= c1 eps for zeta in the boundary shell
/// C P_eps(pi(z)) minus (1/2) P_eps(pi(z)), and |S(z, zeta)| >= c2 |rho(z)| for
/// zeta in P_{|rho(z)|}(pi(z)), with zeta = sd.zeta fixed and z drawn so that
/// sd.zeta lies in the required set (checked with the basis at pi(z)).
inline EstimateReport verify_lemma_ES(const SupportData& sd, const Domain& d, int samples_per_eps,
                                      const std::vector<double>& eps_grid, std::uint64_t seed,
                                      const SupportCheckOptions& o = {}) {
  if (eps_grid.empty()) throw DomainError("verify_lemma_ES: empty eps grid");
  const int ne = static_cast<int>(eps_grid.size());
  const int total = ne * samples_per_eps;
  std::vector<double> r1(static_cast<size_t>(total), std::numeric_limits<double>::quiet_NaN()), r2 = r1;
  std::vector<CVec> w1(static_cast<size_t>(total)), w2 = w1;
  std::vector<ExtremalBasis> base;
  for (double eps : eps_grid) base.push_back(extremal_basis(d, sd.zeta, eps, o.basis));

  auto draw = [&](int e, int i, Rng& rng, bool shell) -> std::pair<double, CVec> {
    const double eps = eps_grid[static_cast<size_t>(e)];
    for (int a = 0; a < o.attempts_per_sample; ++a) {
      const double depth = eps * detail::log_uniform(o.depth_lo, 1.0, rng);
      const CVec p = shell ? detail::shell_point(base[static_cast<size_t>(e)], 0.5, o.shell_C, rng)
                           : detail::polydisc_point(d, base[static_cast<size_t>(e)], 1.0, rng);
      CVec pi, z;
      try {
        pi = d.project_to_boundary(p);
        z = pi - depth * d.unit_normal(pi);
        if (!(d.value(z) < 0.0)) continue;
        pi = d.project_to_boundary(z);
      } catch (const Error&) {
        continue;
      }
      const double scale = shell ? eps : std::abs(d.value(z));
      const ExtremalBasis b = extremal_basis(d, pi, scale, detail::seeded(o.basis, seed, i * 64 + a));
      const bool ok = shell ? detail::in_scaled(b, o.shell_C, sd.zeta) && !detail::in_scaled(b, 0.5, sd.zeta)
                            : detail::in_scaled(b, 1.0, sd.zeta);
      if (ok) return {std::abs(sd.S.eval(as_span(z))) / scale, z};
    }
    return {std::numeric_limits<double>::quiet_NaN(), CVec()};
  };
  parallel_for(total, o.threads, [&](int idx) {
    const int e = idx / samples_per_eps, i = idx % samples_per_eps;
    Rng rng1 = detail::sample_rng(seed, 201 + e, i), rng2 = detail::sample_rng(seed, 301 + e, i);
    std::tie(r1[static_cast<size_t>(idx)], w1[static_cast<size_t>(idx)]) = draw(e, i, rng1, true);
    std::tie(r2[static_cast<size_t>(idx)], w2[static_cast<size_t>(idx)]) = draw(e, i, rng2, false);
  });

  EstimateReport rep{"lemma_ES", std::numeric_limits<double>::infinity(), sd.zeta, {}, 0, seed, true, ""};
  for (const char* which : {"c1", "c2"}) {
    const auto& r = which[1] == '1' ? r1 : r2;
    const auto& w = which[1] == '1' ? w1 : w2;
    std::vector<double> per;
    for (int e = 0; e < ne; ++e) {
      double mn = std::numeric_limits<double>::infinity();
      int got = 0;
      for (int i = 0; i < samples_per_eps; ++i) {
        const size_t idx = static_cast<size_t>(e * samples_per_eps + i);
        if (std::isnan(r[idx])) continue;
        ++got;
        rep.nsamples += 1;
        if (r[idx] < mn) mn = r[idx];
        if (r[idx] < rep.min_margin) rep.min_margin = r[idx], rep.worst_point = w[idx];
      }
      if (got == 0)
        throw DomainError(std::string("verify_lemma_ES: empty sample for ") + which + " at eps " +
                          std::to_string(eps_grid[static_cast<size_t>(e)]));
      rep.fitted_constants[std::string(which) + "_e" + std::to_string(e)] = mn;
      per.push_back(mn);
    }
    const double lo = *std::min_element(per.begin(), per.end());
    const double hi = *std::max_element(per.begin(), per.end());
    rep.fitted_constants[which] = lo;
    rep.fitted_constants[std::string(which) + "_spread"] = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    rep.pass = rep.pass && lo >= 0.01 * detail::median(per);
  }
  return rep;
}

/// Leray section in extremal coordinates for the translated family
/// S(z, zeta) = S_0(z - zeta + sd.zeta): with u = w - eta = Phi (z - zeta),
/// Q*_k(u) = sum_j v_k(j) Q_j. Fits K_k = max |Q*_k| tau_k / eps and the
/// first and mixed derivative constants over |w_k|, |eta_k| <= eq_box tau_k,
/// and cross-checks the exact derivatives against finite differences.
inline EstimateReport verify_lemma_EQ(const SupportData& sd, const Domain& d, const CVec& zeta0, double eps,
                                      int nsamples, std::uint64_t seed, const SupportCheckOptions& o = {}) {
  if (sd.Q.empty()) throw DomainError("verify_lemma_EQ: run leray_decompose first");
  const int n = d.nvars();
  const ExtremalBasis b = extremal_basis(d, zeta0, eps, o.basis);
  for (int k = 0; k < n; ++k)
    if (!(b.tau[static_cast<size_t>(k)] > 0.0)) throw DomainError("verify_lemma_EQ: degenerate basis");
  // Q_j as polynomials in u: z - zeta = Phi^* u, shifted so that u = 0 is S_0's base point.
  std::vector<std::vector<cplx>> M(static_cast<size_t>(n), std::vector<cplx>(static_cast<size_t>(n)));
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) M[static_cast<size_t>(j)][static_cast<size_t>(l)] = b.v[static_cast<size_t>(l)](j);
  std::vector<CxPolynomial> Qs(static_cast<size_t>(n), CxPolynomial(n));
  for (int j = 0; j < n; ++j) {
    const CxPolynomial qj = sd.Q[static_cast<size_t>(j)].compose_affine(as_span(sd.zeta), M);
    for (int k = 0; k < n; ++k) Qs[static_cast<size_t>(k)] += qj * b.v[static_cast<size_t>(k)](j);
  }
  std::vector<std::vector<CxPolynomial>> D1(static_cast<size_t>(n));
  std::vector<std::vector<std::vector<CxPolynomial>>> D2(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      D1[static_cast<size_t>(k)].push_back(Qs[static_cast<size_t>(k)].derivative(i, Wirtinger::Holomorphic));
      std::vector<CxPolynomial> row;
      for (int j = 0; j < n; ++j) row.push_back(D1[static_cast<size_t>(k)].back().derivative(j, Wirtinger::Holomorphic));
      D2[static_cast<size_t>(k)].push_back(std::move(row));
    }
  auto tau_k = [&](int k) { return b.tau[static_cast<size_t>(k)]; };

  EstimateReport rep{"lemma_EQ", 0.0, zeta0, {}, nsamples, seed, true, ""};
  std::vector<double> K(static_cast<size_t>(n), 0.0), Ki = K, Kj = K, Kij = K;
  for (int s = 0; s < nsamples; ++s) {
    Rng rng = detail::sample_rng(seed, 401, s);
    CVec u(n);
    for (int k = 0; k < n; ++k)
      u(k) = random_in_disc(o.eq_box * tau_k(k), rng) - random_in_disc(o.eq_box * tau_k(k), rng);
    const auto us = as_span(u);
    for (int k = 0; k < n; ++k) {
      const double base = tau_k(k) / eps;
      K[static_cast<size_t>(k)] = std::max(K[static_cast<size_t>(k)], std::abs(Qs[static_cast<size_t>(k)].eval(us)) * base);
      for (int i = 0; i < n; ++i) {
        const double g = std::abs(D1[static_cast<size_t>(k)][static_cast<size_t>(i)].eval(us)) * base * tau_k(i);
        Ki[static_cast<size_t>(k)] = std::max(Ki[static_cast<size_t>(k)], g);
        Kj[static_cast<size_t>(k)] = std::max(Kj[static_cast<size_t>(k)], g);  // d/d eta_j = -d/d u_j
        for (int j = 0; j < n; ++j) {
          const double h = std::abs(D2[static_cast<size_t>(k)][static_cast<size_t>(i)][static_cast<size_t>(j)].eval(us)) *
                           base * tau_k(i) * tau_k(j);
          Kij[static_cast<size_t>(k)] = std::max(Kij[static_cast<size_t>(k)], h);
        }
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    const std::string s = std::to_string(k + 1);
    rep.fitted_constants["K_" + s] = K[static_cast<size_t>(k)];
    rep.fitted_constants["K_i" + s] = Ki[static_cast<size_t>(k)];
    rep.fitted_constants["K_j" + s] = Kj[static_cast<size_t>(k)];
    rep.fitted_constants["K_ij" + s] = Kij[static_cast<size_t>(k)];
  }

  // exact d/du_i against a fourth-order central difference along real u_i
  double worst = 0.0;
  for (int s = 0; s < o.fd_points; ++s) {
    Rng rng = detail::sample_rng(seed, 402, s);
    CVec u(n);
    for (int k = 0; k < n; ++k) u(k) = random_in_disc(o.eq_box * tau_k(k), rng);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        const double h = 1e-3 * o.eq_box * tau_k(i);
        auto f = [&](double t) {
          CVec v = u;
          v(i) += t;
          return Qs[static_cast<size_t>(k)].eval(as_span(v));
        };
        const cplx fd = (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h);
        const cplx ex = D1[static_cast<size_t>(k)][static_cast<size_t>(i)].eval(as_span(u));
        // relative to the derivative's size on the box
        const double scale = std::max(std::abs(ex), Ki[static_cast<size_t>(k)] * eps / (tau_k(k) * tau_k(i)));
        if (scale > 0.0) worst = std::max(worst, std::abs(fd - ex) / scale);
      }
  }
  rep.fitted_constants["fd_rel_err"] = worst;
  rep.pass = worst <= 1e-6;
  for (const double v : K) rep.pass = rep.pass && std::isfinite(v);
  return rep;
}

}  // namespace lcft
