#pragma once
// Orders of contact of complex and real lines with the boundary, exceptional
// real lines and the linear type at a boundary point.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lcft/domain.hpp"
#include "lcft/optim.hpp"

namespace lcft {

/// Restriction lambda -> rho(zeta + lambda*gamma) - rho(zeta) as a dense
/// coefficient table c[a][b] of lambda^a conj(lambda)^b, a + b <= degree.
class LineRestriction {
 public:
  LineRestriction() = default;
  LineRestriction(const HermitianPolynomial& rho, const CVec& zeta, const CVec& gamma) : deg_(rho.degree()) {
    if (zeta.size() != rho.nvars() || gamma.size() != rho.nvars())
      throw DimensionError("line restriction: point/direction dimension mismatch");
    const int n = rho.nvars();
    const auto D = static_cast<size_t>(std::max(deg_, 0));
    c_.assign(D + 1, std::vector<cplx>(D + 1, cplx(0.0)));
    // power tables of the linear factors zeta_j + lambda*gamma_j in lambda
    std::vector<std::vector<std::vector<cplx>>> pw(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      auto& tab = pw[static_cast<size_t>(j)];
      tab.push_back({cplx(1.0)});
      for (size_t p = 1; p <= D; ++p) {
        const auto& prev = tab.back();
        std::vector<cplx> next(prev.size() + 1, cplx(0.0));
        for (size_t a = 0; a < prev.size(); ++a) {
          next[a] += prev[a] * zeta(j);
          next[a + 1] += prev[a] * gamma(j);
        }
        tab.push_back(std::move(next));
      }
    }
    std::vector<cplx> hol, anti, tmp;
    for (const auto& [mono, coef] : rho.inner().terms()) {
      hol.assign(1, cplx(1.0));
      anti.assign(1, cplx(1.0));
      for (int j = 0; j < n; ++j) {
        mul_into(hol, pw[static_cast<size_t>(j)][static_cast<size_t>(mono.alpha(j))], tmp, false);
        mul_into(anti, pw[static_cast<size_t>(j)][static_cast<size_t>(mono.beta(j))], tmp, true);
      }
      for (size_t a = 0; a < hol.size(); ++a)
        for (size_t b = 0; b < anti.size(); ++b) c_[a][b] += coef * hol[a] * anti[b];
    }
    if (!c_.empty()) c_[0][0] = 0.0;
  }

  int degree() const { return deg_; }
  cplx coefficient(int a, int b) const {
    if (a < 0 || b < 0 || a + b > deg_) return 0.0;
    return c_[static_cast<size_t>(a)][static_cast<size_t>(b)];
  }

  /// sum_{a+b=d} |c_ab|
  double degree_norm(int d) const {
    double s = 0.0;
    for (int a = std::max(0, d - deg_); a <= std::min(d, deg_); ++a) s += std::abs(coefficient(a, d - a));
    return s;
  }
  double total_norm() const {
    double s = 0.0;
    for (int d = 1; d <= deg_; ++d) s += degree_norm(d);
    return s;
  }

  double value(cplx lambda) const {
    cplx s = 0.0;
    const cplx lb = std::conj(lambda);
    cplx pa = 1.0;
    for (int a = 0; a <= deg_; ++a, pa *= lambda) {
      cplx pb = 1.0;
      for (int b = 0; a + b <= deg_; ++b, pb *= lb) s += coefficient(a, b) * pa * pb;
    }
    return s.real();
  }

  /// Degree-d part along the real ray s -> s*e^{i theta}, differentiated j times
  /// in theta: Re sum_{a+b=d} c_ab (i(a-b))^j e^{i(a-b)theta}.
  double angular_form(int d, double theta, int j = 0) const {
    cplx s = 0.0;
    for (int a = std::max(0, d - deg_); a <= std::min(d, deg_); ++a) {
      const int k = a - (d - a);
      cplx dk = 1.0;
      for (int q = 0; q < j; ++q) dk *= cplx(0.0, k);
      s += coefficient(a, d - a) * dk * std::polar(1.0, k * theta);
    }
    return s.real();
  }

  /// Coefficients g_d of the real polynomial s -> rho(zeta + s e^{i theta} gamma) - rho(zeta).
  std::vector<double> ray_coefficients(double theta) const {
    std::vector<double> g(static_cast<size_t>(deg_ + 1), 0.0);
    for (int d = 1; d <= deg_; ++d) g[static_cast<size_t>(d)] = angular_form(d, theta);
    return g;
  }

 private:
  static void mul_into(std::vector<cplx>& acc, const std::vector<cplx>& f, std::vector<cplx>& tmp, bool conj) {
    if (f.size() == 1) return;
    tmp.assign(acc.size() + f.size() - 1, cplx(0.0));
    for (size_t a = 0; a < acc.size(); ++a)
      for (size_t b = 0; b < f.size(); ++b) tmp[a + b] += acc[a] * (conj ? std::conj(f[b]) : f[b]);
    acc.swap(tmp);
  }

  int deg_ = 0;
  std::vector<std::vector<cplx>> c_;
};

struct ContactOrder {
  int value = 1;
  int sentinel = 3;  // 2m + 1
  bool infinite() const { return value >= sentinel; }
  friend bool operator==(const ContactOrder&, const ContactOrder&) = default;
};

inline nlohmann::json to_json(const ContactOrder& o) {
  if (o.infinite()) return "inf";
  return o.value;
}

struct ContactTolerances {
  double complex_rel = 1e-12;  // coefficient zero test relative to the restriction norm
  double real_rel = 1e-9;      // angular form zero test relative to its degree norm
};

namespace detail {
inline void check_direction(const CVec& gamma) {
  if (!(gamma.norm() > 0.0)) throw DomainError("contact order: zero direction");
}

inline ContactOrder complex_order_of(const LineRestriction& r, int sentinel, const ContactTolerances& tol = {}) {
  const double floor = tol.complex_rel * r.total_norm();
  for (int d = 1; d <= r.degree() && d < sentinel; ++d)
    for (int a = 0; a <= d; ++a)
      if (std::abs(r.coefficient(a, d - a)) > floor) return {d, sentinel};
  return {sentinel, sentinel};
}

inline ContactOrder real_order_of(const LineRestriction& r, double theta, int sentinel,
                                  const ContactTolerances& tol = {}) {
  const double floor = tol.complex_rel * r.total_norm();
  for (int d = 1; d <= r.degree() && d < sentinel; ++d) {
    const double nd = r.degree_norm(d);
    if (nd <= floor) continue;
    if (std::abs(r.angular_form(d, theta)) > std::max(tol.real_rel * nd, floor)) return {d, sentinel};
  }
  return {sentinel, sentinel};
}
}  // namespace detail

// Directions are normalized first so that orders are exactly invariant under
// positive rescaling of gamma.
inline ContactOrder complex_line_order(const Domain& d, const CVec& zeta, const CVec& gamma) {
  detail::check_direction(gamma);
  return detail::complex_order_of(LineRestriction(d.rho(), zeta, gamma.normalized()), d.infinite_order());
}

inline ContactOrder real_line_order(const Domain& d, const CVec& zeta, const CVec& gamma, double theta) {
  detail::check_direction(gamma);
  return detail::real_order_of(LineRestriction(d.rho(), zeta, gamma.normalized()), theta, d.infinite_order());
}

namespace detail {
/// Refines a zero t of the degree-k angular form. With u = e^{2 i theta} the form
/// is e^{-ik theta} p(u), p(u) = sum_a c_{a,k-a} u^a. A root of multiplicity r is a
/// simple root of p^{(r-1)}; Newton on p^{(r-1)} is tried for r = k..1 and the
/// largest r whose limit is a common root of p, ..., p^{(r-1)} is kept.
inline double polish_leading_root(const LineRestriction& lr, int k, double t) {
  std::vector<std::vector<cplx>> der{{}};
  for (int a = 0; a <= k; ++a) der[0].push_back(lr.coefficient(a, k - a));
  for (int j = 1; j <= k; ++j) {
    std::vector<cplx> q;
    for (size_t a = 1; a < der.back().size(); ++a) q.push_back(static_cast<double>(a) * der.back()[a]);
    der.push_back(std::move(q));
  }
  auto eval = [&](int j, cplx u) {
    cplx s = 0.0;
    const auto& q = der[static_cast<size_t>(j)];
    for (size_t a = q.size(); a-- > 0;) s = s * u + q[a];
    return s;
  };
  auto scale = [&](int j) {
    double s = 0.0;
    for (cplx c : der[static_cast<size_t>(j)]) s += std::abs(c);
    return s;
  };
  const cplx u0 = std::polar(1.0, 2.0 * t);
  for (int r = k; r >= 1; --r) {
    if (!(scale(r) > 0.0)) continue;
    cplx u = u0;
    for (int it = 0; it < 60; ++it) {
      const cplx dq = eval(r, u);
      if (std::abs(dq) == 0.0) break;
      const cplx step = eval(r - 1, u) / dq;
      u -= step;
      if (std::abs(step) < 1e-17) break;
    }
    if (!(std::abs(std::abs(u) - 1.0) < 1e-8) || std::abs(u - u0) > 0.05) continue;
    u /= std::abs(u);
    bool common = true;
    for (int j = 0; j < r && common; ++j) common = std::abs(eval(j, u)) <= 1e-8 * scale(j);
    if (common) {
      const double th = 0.5 * std::arg(u);
      // pick the representative closest to t modulo pi
      return th + std::numbers::pi * std::round((t - th) / std::numbers::pi);
    }
  }
  return t;
}
}  // namespace detail

struct ExceptionalLine {
  double theta = 0.0;  // in [0, pi)
  ContactOrder real_order;
  ContactOrder complex_order;
};

/// Real lines s -> zeta + s e^{i theta} gamma whose order of contact exceeds that
/// of the complex line through gamma. Antipodal lines are reported once.
inline std::vector<ExceptionalLine> exceptional_real_lines(const Domain& d, const CVec& zeta, const CVec& gamma,
                                                           int steps = 720) {
  detail::check_direction(gamma);
  const LineRestriction r(d.rho(), zeta, gamma.normalized());
  const ContactOrder k = detail::complex_order_of(r, d.infinite_order());
  std::vector<ExceptionalLine> out;
  if (k.infinite()) return out;
  const int kd = k.value;
  const double scale = r.degree_norm(kd);
  const double h = std::numbers::pi / steps;
  auto absf = [&](int i) { return std::abs(r.angular_form(kd, i * h)); };
  std::vector<double> vals(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i) vals[static_cast<size_t>(i)] = absf(i);
  std::vector<double> roots;
  for (int i = 0; i < steps; ++i) {
    const double v = vals[static_cast<size_t>(i)];
    const double vl = vals[static_cast<size_t>((i + steps - 1) % steps)];
    const double vr = vals[static_cast<size_t>((i + 1) % steps)];
    if (!(v <= vl && v <= vr)) continue;
    const double lo0 = (i - 1) * h, hi0 = (i + 1) * h;
    // lowest derivative of the leading form changing sign across the bracket
    for (int j = 0; j <= kd; ++j) {
      double lo = lo0, hi = hi0;
      double flo = r.angular_form(kd, lo, j), fhi = r.angular_form(kd, hi, j);
      if (flo == 0.0) hi = lo;
      else if (fhi == 0.0) lo = hi;
      else if ((flo > 0) == (fhi > 0)) continue;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = r.angular_form(kd, mid, j);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0) == (flo > 0)) lo = mid, flo = fm;
        else hi = mid;
      }
      const double t = 0.5 * (lo + hi);
      if (std::abs(r.angular_form(kd, t)) <= 1e-12 * scale) {
        double tt = std::fmod(detail::polish_leading_root(r, kd, t), std::numbers::pi);
        if (tt < 0) tt += std::numbers::pi;
        if (std::numbers::pi - tt < 1e-12) tt = 0.0;
        roots.push_back(tt);
      }
      break;
    }
  }
  std::sort(roots.begin(), roots.end());
  for (double t : roots) {
    if (!out.empty() && std::abs(t - out.back().theta) < 1e-8) continue;
    ExceptionalLine e{t, detail::real_order_of(r, t, d.infinite_order()), k};
    if (e.real_order.value > k.value) out.push_back(e);
  }
  if (out.size() > 1 && std::numbers::pi - out.back().theta + out.front().theta < 1e-8) out.pop_back();
  return out;
}

struct LinearTypeResult {
  ContactOrder order;
  CVec direction;  // unit maximizing direction in T^{1,0}, canonical phase
  int candidates = 0;
};

namespace detail {
inline bool lex_less(const CVec& a, const CVec& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (std::abs(a(j).real() - b(j).real()) > 1e-12) return a(j).real() < b(j).real();
    if (std::abs(a(j).imag() - b(j).imag()) > 1e-12) return a(j).imag() < b(j).imag();
  }
  return false;
}
}  // namespace detail

/// Maximal complex-line contact order over T^{1,0}(zeta): structured and random
/// starts, each pushed up by minimizing the lower homogeneous parts of the
/// restriction and snapping small coordinates to zero.
inline LinearTypeResult linear_type(const Domain& d, const CVec& zeta, int n_multistart, Rng& rng) {
  const BoundaryFrame f = d.frame_at(zeta);
  const int k = static_cast<int>(f.tangent_basis.size());
  const int sentinel = d.infinite_order();
  auto direction = [&](const Eigen::VectorXd& x) {
    CVec g = CVec::Zero(d.nvars());
    for (int j = 0; j < k; ++j) g += cplx(x(2 * j), x(2 * j + 1)) * f.tangent_basis[static_cast<size_t>(j)];
    return g;
  };
  auto to_coords = [&](const CVec& c) {
    Eigen::VectorXd x(2 * k);
    for (int j = 0; j < k; ++j) x(2 * j) = c(j).real(), x(2 * j + 1) = c(j).imag();
    return x;
  };

  std::vector<CVec> starts;
  for (int j = 0; j < k; ++j) starts.push_back(unit(k, j));
  const cplx I(0, 1);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (cplx s : {cplx(1), cplx(-1), I, -I}) starts.push_back((unit(k, a) + s * unit(k, b)) / std::sqrt(2.0));
  for (int s = 0; s < n_multistart; ++s) starts.push_back(random_unit_vector(k, rng));

  LinearTypeResult best{{0, sentinel}, CVec(), static_cast<int>(starts.size())};
  for (CVec c : starts) {
    c = canonical_phase(c / c.norm());
    ContactOrder ord = detail::complex_order_of(LineRestriction(d.rho(), zeta, direction(to_coords(c))), sentinel);
    while (!ord.infinite()) {
      const int cur = ord.value;
      auto lower = [&](const Eigen::VectorXd& x) {
        const double nx = x.norm();
        if (!(nx > 0.0)) return 1e300;
        const LineRestriction r(d.rho(), zeta, direction(x / nx));
        double s = 0.0;
        for (int dd = 1; dd <= cur; ++dd) s += r.degree_norm(dd);
        return s;
      };
      const auto res = nelder_mead(lower, to_coords(c), 0.2, 1e-12, 4000);
      Eigen::VectorXd x = res.x / res.x.norm();
      CVec cn(k);
      for (int j = 0; j < k; ++j) {
        cplx v(x(2 * j), x(2 * j + 1));
        if (std::abs(v) < 1e-6) v = 0.0;
        cn(j) = v;
      }
      if (!(cn.norm() > 0.0)) break;
      cn = canonical_phase(cn / cn.norm());
      const ContactOrder next = detail::complex_order_of(LineRestriction(d.rho(), zeta, direction(to_coords(cn))), sentinel);
      if (next.value <= cur) break;
      c = cn;
      ord = next;
    }
    const CVec g = canonical_phase(direction(to_coords(c)));
    if (ord.value > best.order.value || (ord.value == best.order.value && detail::lex_less(g, best.direction))) {
      best.order = ord;
      best.direction = g;
    }
  }
  return best;
}

}  // namespace lcft
