#pragma once
// Nonisotropic radii tau, extremal bases, distinguished polydiscs and the
// pseudodistance d(zeta, z).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "lcft/contact.hpp"
#include "lcft/optim.hpp"

namespace lcft {

struct TauOptions {
  int phases = 256;
  bool refine = true;  // Brent refinement of the best phase arc
  int refine_bits = 40;
  int refine_arcs = 2;  // number of grid local minima refined
};

struct TauResult {
  double tau = 0.0;
  bool capped = false;  // no crossing below rmax
  double phase = 0.0;   // arg(lambda) of the first crossing
};

namespace detail {

/// First s in (0, rmax] with |g(s)| >= eps for g(s) = sum_{d>=1} g_d s^d.
/// Steps are certified: at each r the shifted absolute Taylor polynomial bounds
/// the change of g, and the step solves that bound = remaining gap.
inline double first_crossing(const std::vector<double>& g, double eps, double rmax, bool& capped,
                             std::vector<double>& t) {
  const int D = static_cast<int>(g.size()) - 1;
  double r = 0.0;
  capped = false;
  for (int it = 0; it < 4000; ++it) {
    t = g;
    if (r != 0.0)
      for (int i = 0; i < D; ++i)
        for (int j = D - 1; j >= i; --j) t[static_cast<size_t>(j)] += r * t[static_cast<size_t>(j + 1)];
    const double gap = eps - std::abs(t[0]);
    if (gap <= 1e-12 * eps) return r;
    // d0 = min_k (gap / |t_k|)^{1/k}; the root is only taken when it beats d0
    double d0 = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= D; ++k) {
      const double hk = std::abs(t[static_cast<size_t>(k)]);
      if (hk == 0.0) continue;
      if (d0 < std::numeric_limits<double>::infinity()) {
        double p = hk;
        for (int i = 0; i < k; ++i) p *= d0;
        if (p <= gap) continue;
      }
      d0 = k == 1 ? gap / hk : k == 2 ? std::sqrt(gap / hk) : std::pow(gap / hk, 1.0 / k);
    }
    auto bound = [&](double dl, double& deriv) {
      double v = 0.0, dv = 0.0;
      for (int k = D; k >= 1; --k) {
        dv = dv * dl + v;
        v = v * dl + std::abs(t[static_cast<size_t>(k)]);
      }
      deriv = dv * dl + v;
      return v * dl;
    };
    double delta = std::min(d0, rmax - r);
    double dv = 0.0;
    if (d0 >= rmax - r && bound(delta, dv) < gap) {
      capped = true;
      return rmax;
    }
    for (int k = 0; k < 60; ++k) {
      const double T = bound(delta, dv);
      if (!(dv > 0.0)) break;
      const double nd = delta - (T - gap) / dv;
      if (!(nd < delta)) break;
      const bool done = delta - nd <= 1e-14 * delta;
      delta = nd;
      if (done) break;
    }
    r += delta * (1.0 - 1e-12);
    if (r >= rmax) {
      capped = true;
      return rmax;
    }
  }
  return r;
}

class TauEvaluator {
 public:
  TauEvaluator(const LineRestriction& r, double eps, double rmax) : eps_(eps), rmax_(rmax), D_(r.degree()) {
    for (int d = 1; d <= D_; ++d)
      for (int a = 0; a <= d; ++a) {
        const cplx c = r.coefficient(a, d - a);
        if (c != cplx(0.0)) terms_.push_back({d, 2 * a - d, c});
      }
    g_.assign(static_cast<size_t>(D_ + 1), 0.0);
    pw_.assign(static_cast<size_t>(2 * D_ + 1), cplx(1.0));
  }

  double at_phase(double phi, bool& capped) {
    // pw_[D + k] = e^{i k phi}
    const cplx e = std::polar(1.0, phi);
    const auto D = static_cast<size_t>(D_);
    for (size_t k = 1; k <= D; ++k) {
      pw_[D + k] = pw_[D + k - 1] * e;
      pw_[D - k] = std::conj(pw_[D + k]);
    }
    std::fill(g_.begin(), g_.end(), 0.0);
    for (const Term& t : terms_) {
      const cplx w = pw_[static_cast<size_t>(D_ + t.k)];
      g_[static_cast<size_t>(t.d)] += t.c.real() * w.real() - t.c.imag() * w.imag();
    }
    return first_crossing(g_, eps_, rmax_, capped, scratch_);
  }

  TauResult run(const TauOptions& o) {
    TauResult best{rmax_, true, 0.0};
    const double h = 2 * std::numbers::pi / o.phases;
    vals_.resize(static_cast<size_t>(o.phases));
    for (int i = 0; i < o.phases; ++i) {
      bool capped = false;
      const double s = at_phase(i * h, capped);
      vals_[static_cast<size_t>(i)] = s;
      if (s < best.tau) best = {s, capped, i * h};
    }
    if (best.capped || !o.refine) return best;
    // refine the lowest local minima arcs of the phase grid
    std::vector<std::pair<double, int>> minima;
    for (int i = 0; i < o.phases; ++i) {
      const double v = vals_[static_cast<size_t>(i)];
      if (v <= vals_[static_cast<size_t>((i + o.phases - 1) % o.phases)] && v <= vals_[static_cast<size_t>((i + 1) % o.phases)])
        minima.emplace_back(v, i);
    }
    std::sort(minima.begin(), minima.end());
    auto f = [&](double phi) {
      bool c = false;
      return at_phase(phi, c);
    };
    for (size_t m = 0; m < minima.size() && static_cast<int>(m) < o.refine_arcs; ++m) {
      const int i = minima[m].second;
      const auto [phi, val] = brent_minimize(f, (i - 1) * h, (i + 1) * h, o.refine_bits, 100);
      if (val < best.tau) {
        bool c = false;
        best = {at_phase(phi, c), c, phi};
      }
    }
    return best;
  }

 private:
  struct Term {
    int d, k;
    cplx c;
  };
  double eps_, rmax_;
  int D_;
  std::vector<Term> terms_;
  std::vector<double> g_, scratch_, vals_;
  std::vector<cplx> pw_;
};

}  // namespace detail

inline TauResult tau_of_restriction(const LineRestriction& r, double eps, double rmax, const TauOptions& o = {}) {
  if (!(eps > 0.0)) throw DomainError("tau: eps must be positive");
  return detail::TauEvaluator(r, eps, rmax).run(o);
}

/// tau(zeta, gamma, eps): largest c <= rmax with |rho(zeta + lambda gamma) - rho(zeta)| < eps on |lambda| < c.
inline TauResult tau(const Domain& d, const CVec& zeta, const CVec& gamma, double eps, const TauOptions& o = {}) {
  if (!(gamma.norm() > 0.0)) throw DomainError("tau: zero direction");
  if (!(std::abs(d.value(zeta)) < d.w0())) throw DomainError("tau: point is outside W0");
  return tau_of_restriction(LineRestriction(d.rho(), zeta, gamma.normalized()), eps, d.rmax(), o);
}

struct ExtremalBasis {
  CVec zeta;
  double eps = 0.0;
  std::vector<CVec> v;
  std::vector<double> tau;
  std::vector<bool> capped;
  CMat Phi;  // rows conj(v_k): Phi (z - zeta) are the extremal coordinates
  bool stagnated = false;

  int n() const { return static_cast<int>(v.size()); }
  CVec coordinates(const CVec& z) const { return Phi * (z - zeta); }
};

/// Greedy objective. MaxTau maximizes tau over unit vectors; LevelReach scales
/// each direction u to the vector gamma = s u that first reaches the eps-level
/// along the real ray and maximizes tau(zeta, gamma, eps) = tau(zeta, u, eps) / s.
enum class BasisObjective { MaxTau, LevelReach };

struct BasisOptions {
  int n_multistart = 64;  // random starts per greedy step (structured starts are always added)
  int polish_starts = 3;  // best starts refined by Nelder-Mead
  int nm_max_iter = 400;
  double nm_tol = 1e-4;
  int coarse_phases = 64;
  std::uint64_t seed = 0;
  double nm_step = 0.1;  // initial simplex size; a quarter of it when starting from the hint
  double nm_stall = 1e-7;  // relative improvement below which Nelder-Mead counts as stalled
  BasisObjective objective = BasisObjective::MaxTau;
};

namespace detail {

inline std::vector<CVec> complement_basis(const std::vector<CVec>& done, int n) {
  std::vector<CVec> out;
  std::vector<CVec> all = done;
  for (int j = 0; j < n && static_cast<int>(all.size()) < n; ++j) {
    CVec v = project_out(project_out(unit(n, j), all), all);
    if (v.norm() < 1e-8) continue;
    v /= v.norm();
    all.push_back(v);
    out.push_back(v);
  }
  return out;
}

inline bool same_line(const CVec& a, const CVec& b) { return std::abs(inner(a, b)) > 1.0 - 1e-12; }

}  // namespace detail

/// Greedy eps-extremal basis at zeta: v1 the unit normal of the level set, then
/// each v_k maximizes tau over unit vectors orthogonal to v_1..v_{k-1}.
inline ExtremalBasis extremal_basis(const Domain& d, const CVec& zeta, double eps, const BasisOptions& o = {},
                                    const ExtremalBasis* hint = nullptr) {
  if (!(std::abs(d.value(zeta)) < d.w0())) throw DomainError("extremal_basis: point is outside W0");
  if (!(eps > 0.0)) throw DomainError("extremal_basis: eps must be positive");
  const int n = d.nvars();
  Rng rng(o.seed);
  ExtremalBasis B;
  B.zeta = zeta;
  B.eps = eps;
  auto full_tau = [&](const CVec& g) { return tau(d, zeta, g, eps); };
  const TauOptions coarse{o.coarse_phases, true, 16, 2};
  auto score = [&](const CVec& g, const TauResult& t) {
    if (o.objective == BasisObjective::MaxTau) return t.tau;
    const TauResult reach = tau(d, zeta, g, eps, TauOptions{1, false, 0, 0});
    return t.tau / reach.tau;
  };
  auto coarse_tau = [&](const CVec& g) { return score(g, tau(d, zeta, g, eps, coarse)); };

  B.v.push_back(d.unit_normal(zeta));
  {
    const TauResult t = full_tau(B.v[0]);
    B.tau.push_back(t.tau);
    B.capped.push_back(t.capped);
  }
  for (int k = 1; k < n; ++k) {
    const std::vector<CVec> H = detail::complement_basis(B.v, n);
    const int dim = static_cast<int>(H.size());
    auto embed = [&](const CVec& c) {
      CVec g = CVec::Zero(n);
      for (int j = 0; j < dim; ++j) g += c(j) * H[static_cast<size_t>(j)];
      return g;
    };
    if (dim == 1) {
      const CVec g = canonical_phase(H[0]);
      const TauResult t = full_tau(g);
      B.v.push_back(g);
      B.tau.push_back(t.tau);
      B.capped.push_back(t.capped);
      continue;
    }
    // candidate coefficient vectors in the basis H
    std::vector<CVec> structured;
    for (int j = 0; j < dim; ++j) structured.push_back(unit(dim, j));
    const cplx I(0, 1);
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b)
        for (cplx s : {cplx(1), cplx(-1), I, -I}) structured.push_back((unit(dim, a) + s * unit(dim, b)) / std::sqrt(2.0));
    int hint_idx = -1;
    if (hint != nullptr && k < hint->n()) {
      CVec c(dim);
      for (int j = 0; j < dim; ++j) c(j) = inner(hint->v[static_cast<size_t>(k)], H[static_cast<size_t>(j)]);
      if (c.norm() > 1e-6) {
        hint_idx = static_cast<int>(structured.size());
        structured.push_back(c / c.norm());
      }
    }
    std::vector<CVec> starts = structured;
    for (int s = 0; s < o.n_multistart; ++s) starts.push_back(random_unit_vector(dim, rng));

    std::vector<std::pair<double, int>> scored;
    bool all_capped = true;
    for (size_t i = 0; i < starts.size(); ++i) {
      const CVec g = embed(starts[i]);
      const TauResult t = tau(d, zeta, g, eps, coarse);
      all_capped = all_capped && t.capped;
      scored.emplace_back(-score(g, t), static_cast<int>(i));
    }
    std::stable_sort(scored.begin(), scored.end());

    std::vector<CVec> finalists;
    for (const CVec& c : structured) finalists.push_back(c);
    if (!all_capped) {
      int polished = 0;
      for (const auto& [negt, idx] : scored) {
        if (polished >= o.polish_starts) break;
        const CVec c0 = starts[static_cast<size_t>(idx)];
        bool dup = false;
        for (size_t f = structured.size(); f < finalists.size(); ++f) dup = dup || detail::same_line(finalists[f], c0);
        if (dup) continue;
        ++polished;
        // affine chart of CP^{dim-1}: the largest coordinate of the start is fixed to 1
        Eigen::Index piv = 0;
        c0.cwiseAbs().maxCoeff(&piv);
        const CVec cs = c0 / c0(piv);
        auto from_params = [&](const Eigen::VectorXd& x) {
          CVec c(dim);
          int q = 0;
          for (int j = 0; j < dim; ++j) {
            if (j == piv) {
              c(j) = 1.0;
            } else {
              c(j) = cplx(x(2 * q), x(2 * q + 1));
              ++q;
            }
          }
          return CVec(c / c.norm());
        };
        Eigen::VectorXd x0(2 * (dim - 1));
        int q = 0;
        for (int j = 0; j < dim; ++j)
          if (j != piv) {
            x0(2 * q) = cs(j).real();
            x0(2 * q + 1) = cs(j).imag();
            ++q;
          }
        const auto res = nelder_mead([&](const Eigen::VectorXd& x) { return -coarse_tau(embed(from_params(x))); }, x0,
                                     idx == hint_idx ? o.nm_step / 4 : o.nm_step, o.nm_tol, o.nm_max_iter,
                                     o.nm_stall);
        if (res.iterations >= o.nm_max_iter) B.stagnated = true;
        finalists.push_back(from_params(res.x));
      }
    }
    // full-accuracy comparison; polished candidates must beat structured ones
    // by more than the tau tolerance
    double best = -1.0;
    TauResult best_t;
    CVec best_c;
    for (size_t f = 0; f < finalists.size(); ++f) {
      const CVec g = embed(finalists[f]);
      const TauResult t = full_tau(g);
      const double sc = score(g, t);
      const double margin = f < structured.size() ? 1.0 : 1.0 + 1e-9;
      if (best < 0.0 || sc > best * margin) {
        best = sc;
        best_t = t;
        best_c = finalists[f];
      }
    }
    const CVec g = canonical_phase(embed(best_c).normalized());
    B.v.push_back(g);
    B.tau.push_back(best_t.tau);
    B.capped.push_back(best_t.capped);
  }
  B.Phi = CMat(n, n);
  for (int k = 0; k < n; ++k) B.Phi.row(k) = B.v[static_cast<size_t>(k)].adjoint();
  return B;
}

struct Polydisc {
  ExtremalBasis basis;
  double scale = 1.0;
};

struct Membership {
  bool contained = false;
  CVec lambda;
};

/// z in A P_eps(zeta) iff |lambda_k| <= A tau_k with lambda = Phi (z - zeta).
inline Membership polydisc_contains(const ExtremalBasis& b, double A, const CVec& z) {
  Membership m{true, b.coordinates(z)};
  for (int k = 0; k < b.n(); ++k)
    if (std::abs(m.lambda(k)) > A * b.tau[static_cast<size_t>(k)] * (1.0 + 1e-12)) m.contained = false;
  return m;
}
inline Membership polydisc_contains(const Polydisc& p, const CVec& z) { return polydisc_contains(p.basis, p.scale, z); }

struct DistanceOptions {
  int steps_per_octave = 8;
  int max_index = 480;  // smallest grid value 2^{-max_index / steps_per_octave}
  int lookahead = 4;    // deeper grid points checked past a transition (quasi-monotonicity)
  double refine_rel = 0.0;  // > 0: log-bisection refinement inside the final grid cell
  BasisOptions basis{8, 1, 300, 1e-4, 64, 0};
};

struct DistanceResult {
  double value = 0.0;
  bool far = false;          // not contained at eps = 1
  bool below_grid = false;   // contained down to the smallest grid value
  double last_eps = 0.0;
  int bases_computed = 0;
};

/// Caches extremal bases at one base point by grid index.
class BasisCache {
 public:
  BasisCache(const Domain& d, CVec zeta, DistanceOptions o) : d_(d), zeta_(std::move(zeta)), o_(std::move(o)) {}

  double eps_at(int k) const { return std::exp2(-static_cast<double>(k) / o_.steps_per_octave); }

  const ExtremalBasis& at_index(int k) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    const ExtremalBasis* hint = nullptr;
    if (!cache_.empty()) {
      auto nb = cache_.lower_bound(k);
      if (nb == cache_.end()) --nb;
      hint = &nb->second;
    }
    ++computed_;
    return cache_.emplace(k, extremal_basis(d_, zeta_, eps_at(k), o_.basis, hint)).first->second;
  }
  ExtremalBasis at_eps(double eps, const ExtremalBasis* hint) {
    ++computed_;
    return extremal_basis(d_, zeta_, eps, o_.basis, hint);
  }
  bool contains(int k, const CVec& z) { return polydisc_contains(at_index(k), 1.0, z).contained; }
  int computed() const { return computed_; }
  const CVec& zeta() const { return zeta_; }
  const Domain& domain() const { return d_; }
  const DistanceOptions& options() const { return o_; }

 private:
  const Domain& d_;
  CVec zeta_;
  DistanceOptions o_;
  std::map<int, ExtremalBasis> cache_;
  int computed_ = 0;
};

namespace detail {

/// Deepest grid index j with tau(zeta, v_k, eps_j) >= |lambda_k| for every k:
/// where the basis directions of `b` alone would stop covering z.
inline int estimate_index(const Domain& d, BasisCache& cache, const ExtremalBasis& b, const CVec& z) {
  const DistanceOptions& o = cache.options();
  const CVec lam = b.coordinates(z);
  const TauOptions coarse{o.basis.coarse_phases, true, 16, 2};
  int est = o.max_index;
  for (int k = 0; k < b.n(); ++k) {
    const double need = std::abs(lam(k));
    if (need == 0.0) continue;
    const CVec& v = b.v[static_cast<size_t>(k)];
    auto covered = [&](int j) { return tau(d, cache.zeta(), v, cache.eps_at(j), coarse).tau >= need; };
    if (!covered(0)) return 0;
    int lo = 0, hi = est + 1;
    if (hi <= o.max_index && covered(hi - 1)) continue;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (covered(mid) ? lo : hi) = mid;
    }
    est = std::min(est, lo);
  }
  return est;
}

}  // namespace detail

/// d(zeta, z) = inf{eps : z in P_eps(zeta)} on the grid eps_k = 2^{-k/8}.
/// The transition is bracketed from a tau-inversion estimate along the basis
/// directions, then located by a galloping search on the grid.
inline DistanceResult pseudodistance(BasisCache& cache, const CVec& z) {
  const DistanceOptions& o = cache.options();
  DistanceResult res;
  const int before = cache.computed();
  if ((z - cache.zeta()).norm() <= 1e-14) return res;
  auto finish = [&](double v) {
    res.value = v;
    res.last_eps = v;
    res.bases_computed = cache.computed() - before;
    return res;
  };
  if (!cache.contains(0, z)) {
    res.far = true;
    return finish(1.0);
  }
  int k = 0;
  for (int it = 0; it < 3; ++it) {
    const int next = detail::estimate_index(cache.domain(), cache, cache.at_index(k), z);
    const bool close = std::abs(next - k) <= 1 && it > 0;
    k = next;
    if (close) break;
  }
  // galloping search from k for a transition: lo contained, hi = lo + 1 not
  int lo = 0, hi = o.max_index;
  if (cache.contains(k, z)) {
    lo = k;
    for (int step = 1;; step *= 2) {
      const int j = std::min(lo + step, o.max_index);
      if (!cache.contains(j, z)) {
        hi = j;
        break;
      }
      lo = j;
      if (j == o.max_index) {
        res.below_grid = true;
        return finish(cache.eps_at(o.max_index));
      }
    }
  } else {
    hi = k;
    for (int step = 1;; step *= 2) {
      const int j = std::max(hi - step, 0);
      if (cache.contains(j, z)) {
        lo = j;
        break;
      }
      hi = j;
    }
  }
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (cache.contains(mid, z) ? lo : hi) = mid;
  }
  // look a few grid points deeper for a later re-entry
  for (;;) {
    int deeper = -1;
    for (int j = lo + 2; j <= std::min(lo + 1 + o.lookahead, o.max_index - 1); ++j)
      if (cache.contains(j, z)) deeper = j;
    if (deeper < 0) break;
    lo = deeper;
    hi = lo + 1;
    while (hi < o.max_index && cache.contains(hi, z)) lo = hi++;
  }
  double value = cache.eps_at(lo);
  if (o.refine_rel > 0.0) {
    double a = cache.eps_at(hi), b = value;  // a not contained, b contained
    const ExtremalBasis* hint = &cache.at_index(lo);
    while (b / a > 1.0 + o.refine_rel) {
      const double m = std::sqrt(a * b);
      const ExtremalBasis B = cache.at_eps(m, hint);
      (polydisc_contains(B, 1.0, z).contained ? b : a) = m;
    }
    value = b;
  }
  return finish(value);
}

inline DistanceResult pseudodistance(const Domain& d, const CVec& zeta, const CVec& z, const DistanceOptions& o = {}) {
  BasisCache cache(d, zeta, o);
  return pseudodistance(cache, z);
}

}  // namespace lcft
