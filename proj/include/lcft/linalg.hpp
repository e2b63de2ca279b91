#pragma once
// Small helpers around Eigen complex vectors and seeded sampling.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lcft {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline std::span<const cplx> as_span(const CVec& v) { return {v.data(), static_cast<size_t>(v.size())}; }

/// Hermitian product sum_j u_j conj(v_j).
inline cplx inner(const CVec& u, const CVec& v) { return v.dot(u); }

inline CVec unit(int n, int j) {
  CVec e = CVec::Zero(n);
  e(j) = 1.0;
  return e;
}

inline CVec from_list(std::initializer_list<cplx> xs) {
  CVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (cplx x : xs) v(i++) = x;
  return v;
}

/// Uniform direction on the unit sphere of C^n.
inline CVec random_unit_vector(int n, Rng& rng) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (int j = 0; j < n; ++j) v(j) = {g(rng), g(rng)};
  return v / v.norm();
}

/// Uniform point in the euclidean ball of radius r in C^n.
inline CVec random_in_ball(int n, double r, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rad = r * std::pow(u(rng), 1.0 / (2.0 * n));
  return random_unit_vector(n, rng) * rad;
}

/// Uniform point in the disc of radius r in C.
inline cplx random_in_disc(double r, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rad = r * std::sqrt(u(rng));
  return std::polar(rad, 2.0 * std::numbers::pi * u(rng));
}

/// Remove the components along the orthonormal vectors in basis.
inline CVec project_out(CVec v, const std::vector<CVec>& basis) {
  for (const CVec& b : basis) v -= inner(v, b) * b;
  return v;
}

/// Rotate v so that its largest-modulus component is real and positive.
inline CVec canonical_phase(const CVec& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v(k)) == 0.0) return v;
  return v * (std::abs(v(k)) / v(k));
}

}  // namespace lcft
