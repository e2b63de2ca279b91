#pragma once
// Two-dimensional slices w -> zeta - i w1 n + w2 t of the defining function and
// the homogeneous Taylor parts of their restriction to w1 = 0.

#include <cmath>
#include <functional>
#include <vector>

#include "lcft/domain.hpp"

namespace lcft {

struct Slice {
  BoundaryFrame frame;
  CVec t;
  HermitianPolynomial r_slice;  // r(zeta - i w1 n + w2 t) - r(zeta) in (w1, w2)

  CVec point(cplx w1, cplx w2) const { return frame.zeta - cplx(0, 1) * w1 * frame.normal + w2 * t; }
};

/// Homogeneous parts P^j(w2) of r_slice(0, w2); P[j] has one variable.
struct SliceTaylor {
  std::vector<CxPolynomial> P;  // index j = 0..deg, P[0] = 0
  std::vector<double> norms;

  int max_degree() const { return static_cast<int>(P.size()) - 1; }
  const CxPolynomial& part(int j) const { return P.at(static_cast<size_t>(j)); }
  double norm(int j) const { return j < static_cast<int>(norms.size()) ? norms[static_cast<size_t>(j)] : 0.0; }
};

inline Slice make_slice(const Domain& d, const CVec& zeta, const CVec& t) {
  if (zeta.size() != d.nvars() || t.size() != d.nvars()) throw DimensionError("make_slice: dimension mismatch");
  if (!(std::abs(d.value(zeta)) < d.w0())) throw DomainError("make_slice: point is outside W0");
  if (std::abs(t.norm() - 1.0) > 1e-10) throw DomainError("make_slice: t must be a unit vector");
  const CVec drho = d.dz(zeta);
  if (std::abs(t.cwiseProduct(drho).sum()) > 1e-8 * std::max(1.0, drho.norm()))
    throw DomainError("make_slice: t is not complex tangent");
  Slice s{d.level_frame(zeta), t, {}};
  const cplx I(0, 1);
  std::vector<std::vector<cplx>> M(static_cast<size_t>(d.nvars()), std::vector<cplx>(2));
  for (int j = 0; j < d.nvars(); ++j) {
    M[static_cast<size_t>(j)][0] = -I * s.frame.normal(j);
    M[static_cast<size_t>(j)][1] = t(j);
  }
  CxPolynomial r = HermitianPolynomial::real_part_of(d.rho().inner().compose_affine(as_span(zeta), M)).inner();
  const Monomial one(2);
  r.add_term(one, -r.coefficient(one));
  s.r_slice = HermitianPolynomial(std::move(r));
  return s;
}

inline SliceTaylor slice_taylor(const Slice& s) {
  const int deg = std::max(s.r_slice.degree(), 0);
  SliceTaylor out;
  out.P.assign(static_cast<size_t>(deg + 1), CxPolynomial(1));
  for (const auto& [mono, c] : s.r_slice.inner().terms()) {
    if (mono.alpha(0) != 0 || mono.beta(0) != 0) continue;
    const int j = mono.alpha(1) + mono.beta(1);
    out.P[static_cast<size_t>(j)].add_term(Monomial(std::vector<int>{mono.alpha(1)}, std::vector<int>{mono.beta(1)}), c);
  }
  for (const auto& p : out.P) out.norms.push_back(p.norm());
  return out;
}

/// Dense coefficient vector (w2^k conj(w2)^{j-k})_{k=0..j} of P^j.
inline std::vector<cplx> taylor_coefficients(const SliceTaylor& st, int j) {
  std::vector<cplx> c(static_cast<size_t>(j + 1), cplx(0.0));
  if (j > st.max_degree()) return c;
  for (int k = 0; k <= j; ++k)
    c[static_cast<size_t>(k)] = st.part(j).coefficient(Monomial(std::vector<int>{k}, std::vector<int>{j - k}));
  return c;
}

struct SmoothnessReport {
  int j = 0;
  int samples = 0;
  double max_divided_difference = 0.0;       // at `samples` steps
  double max_divided_difference_fine = 0.0;  // at 2 * samples steps
  double max_jump = 0.0;                     // largest coefficient change between consecutive coarse samples
};

/// Modulus of continuity of the P^j coefficients along s -> (zeta(s), t(s)),
/// s in [0, 1], measured by first divided differences at two resolutions.
inline SmoothnessReport smoothness_probe(const Domain& d, const std::function<CVec(double)>& zeta_path,
                                         const std::function<CVec(double)>& t_path, int j, int samples = 64) {
  auto coeffs = [&](double s) {
    const CVec z = zeta_path(s);
    if (!(std::abs(d.value(z)) < d.w0())) throw DomainError("smoothness_probe: path leaves W0");
    return taylor_coefficients(slice_taylor(make_slice(d, z, t_path(s))), j);
  };
  auto dist = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += std::norm(a[k] - b[k]);
    return std::sqrt(s);
  };
  SmoothnessReport rep;
  rep.j = j;
  rep.samples = samples;
  for (int pass = 0; pass < 2; ++pass) {
    const int n = samples << pass;
    const double h = 1.0 / n;
    auto prev = coeffs(0.0);
    double dd = 0.0, jump = 0.0;
    for (int k = 1; k <= n; ++k) {
      auto cur = coeffs(k * h);
      const double delta = dist(cur, prev);
      dd = std::max(dd, delta / h);
      jump = std::max(jump, delta);
      prev = std::move(cur);
    }
    if (pass == 0) {
      rep.max_divided_difference = dd;
      rep.max_jump = jump;
    } else {
      rep.max_divided_difference_fine = dd;
    }
  }
  return rep;
}

}  // namespace lcft
