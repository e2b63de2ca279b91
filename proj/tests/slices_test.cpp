#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lcft/slices.hpp"

using namespace lcft;

namespace {

const cplx I(0, 1);

Domain model() { return builtin_domain("paper-model"); }

double factorial(int k) { return std::tgamma(k + 1.0); }

// Oracle for P^j via mixed Wirtinger derivatives at 0 of r_slice(0, w2).
cplx taylor_oracle(const Slice& s, int k, int l) {
  CxPolynomial p = s.r_slice.inner();
  for (int i = 0; i < k; ++i) p = p.derivative(1, Wirtinger::Holomorphic);
  for (int i = 0; i < l; ++i) p = p.derivative(1, Wirtinger::Antiholomorphic);
  return p.eval({0.0, 0.0}) / (factorial(k) * factorial(l));
}

// Oracle: evaluate r at the slice point directly.
double direct_slice_value(const Domain& d, const Slice& s, cplx w1, cplx w2) {
  return d.value(s.point(w1, w2)) - d.value(s.frame.zeta);
}

}  // namespace

TEST(MakeSlice, HalfSpaceIsLinearInW1) {
  const Domain d = builtin_domain("half-space");
  const Slice s = make_slice(d, CVec::Zero(3), unit(3, 1));
  EXPECT_EQ(s.r_slice.degree(), 1);
  // r(0 + w1 e1) = Im w1 ... evaluated: point is -i w1 (i e1) = w1 e1
  EXPECT_NEAR(s.r_slice.eval({cplx(0.3, -0.2), cplx(0.5, 0.5)}), -0.2, 1e-15);
  EXPECT_NEAR(s.r_slice.eval({cplx(0.0, 0.0), cplx(0.5, 0.5)}), 0.0, 1e-15);
}

TEST(MakeSlice, ConstantTermIsExactlyZero) {
  const Domain d = model();
  Rng rng(1);
  for (const CVec& z : d.sample_near_boundary(20, 1e-3, 1e-1, rng)) {
    const BoundaryFrame f = d.level_frame(z);
    const Slice s = make_slice(d, z, f.tangent_basis[0]);
    EXPECT_EQ(s.r_slice.inner().coefficient(Monomial(2)), cplx(0.0));
    EXPECT_LE(s.r_slice.degree(), 10);
  }
}

TEST(MakeSlice, AgreesWithDirectEvaluation) {
  const Domain d = model();
  Rng rng(2);
  for (const CVec& z : d.sample_boundary(10, rng)) {
    const BoundaryFrame f = d.frame_at(z);
    const Slice s = make_slice(d, z, f.tangent_basis[1]);
    for (int k = 0; k < 10; ++k) {
      const cplx w1 = random_in_disc(0.3, rng), w2 = random_in_disc(0.3, rng);
      EXPECT_NEAR(s.r_slice.eval({w1, w2}), direct_slice_value(d, s, w1, w2), 1e-12);
    }
  }
}

TEST(MakeSlice, NegativeForNegativeImaginaryW1OnHalfSpace) {
  const Domain d = builtin_domain("half-space");
  const Slice s = make_slice(d, CVec::Zero(3), unit(3, 2));
  EXPECT_LT(s.r_slice.eval({cplx(0.7, -0.1), cplx(2.0, 0.0)}), 0.0);
}

TEST(MakeSlice, Errors) {
  const Domain d = model();
  EXPECT_THROW(make_slice(d, CVec::Zero(3), unit(3, 0)), DomainError);
  EXPECT_THROW(make_slice(d, CVec::Zero(3), 2.0 * unit(3, 1)), DomainError);
  EXPECT_THROW(make_slice(d, -I * unit(3, 0), unit(3, 1)), DomainError);
  EXPECT_THROW(make_slice(d, CVec::Zero(2), unit(2, 1)), DimensionError);
}

TEST(SliceTaylor, ModelSecondAxis) {
  const Slice s = make_slice(model(), CVec::Zero(3), unit(3, 1));
  const SliceTaylor st = slice_taylor(s);
  EXPECT_NEAR(st.norm(4), 1.0, 1e-15);
  for (int j = 0; j <= st.max_degree(); ++j)
    if (j != 4) {
      EXPECT_EQ(st.norm(j), 0.0) << j;
    }
  for (int k = 0; k <= 4; ++k) {
    const double binom = factorial(4) / (factorial(k) * factorial(4 - k));
    EXPECT_NEAR(std::abs(taylor_coefficients(st, 4)[static_cast<size_t>(k)] - binom / 16.0), 0.0, 1e-15);
  }
}

TEST(SliceTaylor, ModelThirdAxis) {
  const Slice s = make_slice(model(), CVec::Zero(3), unit(3, 2));
  const SliceTaylor st = slice_taylor(s);
  EXPECT_NEAR(st.norm(6), 1.0, 1e-14);
  EXPECT_NEAR(st.norm(10), 1.0, 1e-14);
  for (int j : {1, 2, 3, 4, 5, 7, 8, 9}) EXPECT_EQ(st.norm(j), 0.0) << j;
  // r_slice(0, w2) = (Re w2)^6 + (Im w2)^10
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const cplx w = random_in_disc(0.9, rng);
    EXPECT_NEAR(s.r_slice.eval({0.0, w}), std::pow(w.real(), 6) + std::pow(w.imag(), 10), 1e-14);
  }
}

TEST(SliceTaylor, BallIsModulusSquared) {
  const Domain d = builtin_domain("ball");
  const BoundaryFrame f = d.frame_at(unit(3, 0));
  for (const CVec& t : {f.tangent_basis[0], f.tangent_basis[1], ((f.tangent_basis[0] - I * f.tangent_basis[1]) / std::sqrt(2.0)).eval()}) {
    const SliceTaylor st = slice_taylor(make_slice(d, unit(3, 0), t));
    EXPECT_NEAR(st.norm(2), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(taylor_coefficients(st, 2)[1] - 1.0), 0.0, 1e-15);
    for (int j = 3; j <= st.max_degree(); ++j) EXPECT_EQ(st.norm(j), 0.0);
  }
}

TEST(SliceTaylor, MatchesWirtingerDerivativeOracle) {
  const Domain d = model();
  Rng rng(4);
  for (const CVec& z : d.sample_boundary(5, rng)) {
    const BoundaryFrame f = d.frame_at(z);
    const Slice s = make_slice(d, z, f.tangent_basis[0]);
    const SliceTaylor st = slice_taylor(s);
    for (int j = 1; j <= 10; ++j) {
      const auto c = taylor_coefficients(st, j);
      for (int k = 0; k <= j; ++k) {
        const cplx want = taylor_oracle(s, k, j - k);
        EXPECT_LT(std::abs(c[static_cast<size_t>(k)] - want), 1e-12 * (1 + std::abs(want)));
      }
    }
  }
}

TEST(SliceTaylor, PartsAreHomogeneousRealAndReconstruct) {
  const Domain d = model();
  Rng rng(5);
  for (const CVec& z : d.sample_near_boundary(10, 1e-3, 5e-2, rng)) {
    const BoundaryFrame f = d.level_frame(z);
    const Slice s = make_slice(d, z, f.tangent_basis[1]);
    const SliceTaylor st = slice_taylor(s);
    CxPolynomial sum(1);
    for (int j = 0; j <= st.max_degree(); ++j) {
      for (const auto& [m, c] : st.part(j).terms()) EXPECT_EQ(m.degree(), j);
      sum += st.part(j);
      for (int k = 0; k < 10; ++k) EXPECT_LT(std::abs(st.part(j).eval({random_in_disc(1.0, rng)}).imag()), 1e-12);
    }
    for (int k = 0; k < 10; ++k) {
      const cplx w = random_in_disc(0.5, rng);
      EXPECT_NEAR(sum.eval({w}).real(), s.r_slice.eval({0.0, w}), 1e-13);
    }
    // the degree-1 tangential part is exposed off the boundary; it vanishes only on it
    EXPECT_GE(st.norm(1), 0.0);
  }
}

TEST(SliceTaylor, RotationInvariance) {
  const Domain d = model();
  Rng rng(6);
  const CVec z = d.sample_boundary(1, rng)[0];
  const BoundaryFrame f = d.frame_at(z);
  const double th = 0.7;
  const SliceTaylor a = slice_taylor(make_slice(d, z, f.tangent_basis[0]));
  const SliceTaylor b = slice_taylor(make_slice(d, z, std::polar(1.0, th) * f.tangent_basis[0]));
  for (int j = 2; j <= 10; ++j) {
    EXPECT_LE(b.norm(j), std::pow(2.0, j) * a.norm(j) + 1e-14);
    for (int k = 0; k < 10; ++k) {
      const cplx w = std::polar(0.4, 2 * std::numbers::pi * k / 10.0);
      EXPECT_NEAR(b.part(j).eval({w}).real(), a.part(j).eval({std::polar(1.0, th) * w}).real(), 1e-13);
    }
  }
}

TEST(SmoothnessProbe, ConstantPathHasZeroVariation) {
  const Domain d = model();
  const auto rep = smoothness_probe(
      d, [](double) { return CVec(CVec::Zero(3)); }, [](double) { return unit(3, 1); }, 4, 16);
  EXPECT_EQ(rep.max_divided_difference, 0.0);
  EXPECT_EQ(rep.max_divided_difference_fine, 0.0);
}

TEST(SmoothnessProbe, RotatingBoundaryPointConverges) {
  const Domain d = model();
  auto zeta = [&](double s) {
    const cplx z2 = std::polar(0.1, 2 * std::numbers::pi * s), z3 = 0.05;
    const double rest = std::pow(z2.real(), 4) + std::pow(z3.real(), 6) + std::pow(z3.imag(), 10);
    return from_list({-I * rest, z2, z3});
  };
  auto t = [&](double s) { return d.level_frame(zeta(s)).tangent_basis[0]; };
  const auto rep = smoothness_probe(d, zeta, t, 4, 32);
  EXPECT_GT(rep.max_divided_difference, 0.0);
  EXPECT_LT(rep.max_divided_difference, 10.0);
  EXPECT_NEAR(rep.max_divided_difference_fine / rep.max_divided_difference, 1.0, 0.05);
}

TEST(SmoothnessProbe, PathLeavingW0Throws) {
  const Domain d = model();
  EXPECT_THROW(smoothness_probe(
                   d, [](double s) { return CVec(-I * (s * 2.0) * unit(3, 0)); }, [](double) { return unit(3, 1); }, 4, 8),
               DomainError);
}
