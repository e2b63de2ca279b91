#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lcft/support.hpp"

using namespace lcft;

namespace {

CxPolynomial monomial(int n, int var, int power, cplx c) {
  Monomial m(n);
  m.alpha(var) = power;
  CxPolynomial p(n);
  p.add_term(m, c);
  return p;
}

CVec origin(const Domain& d) { return CVec::Zero(d.nvars()); }

// min over phases of the slice margin per |w2|^d for Re-power restrictions,
// from the closed form cos^a(phi) + b cos(d phi) on a dense phase grid
double phase_min(int a, double b, int deg) {
  double mn = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    const double phi = 2 * std::numbers::pi * i / 200000.0;
    mn = std::min(mn, std::pow(std::cos(phi), a) + b * std::cos(deg * phi));
  }
  return mn;
}

}  // namespace

TEST(PluriharmonicSupport, ModelPaperSigns) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = pluriharmonic_support(d, origin(d), 0.1);
  CxPolynomial expect = monomial(3, 0, 1, cplx(0, -1)) + monomial(3, 1, 4, -0.1) + monomial(3, 2, 6, 0.1);
  EXPECT_EQ(sd.S, expect);
  EXPECT_EQ(sd.orders, (std::vector<int>{0, 4, 6}));
  EXPECT_EQ(sd.signs, (std::vector<int>{0, -1, 1}));
  const SupportData fl = pluriharmonic_support(d, origin(d), 0.1, SignChoice::Flipped);
  EXPECT_EQ(fl.signs, (std::vector<int>{0, 1, -1}));
}

TEST(PluriharmonicSupport, HalfSpaceAndRigid2d) {
  const Domain h = builtin_domain("half-space");
  EXPECT_EQ(pluriharmonic_support(h, origin(h), 0.1).S, monomial(h.nvars(), 0, 1, cplx(0, -1)));
  const Domain r = builtin_domain("rigid-2d");
  EXPECT_EQ(pluriharmonic_support(r, origin(r), 0.2).S,
            monomial(2, 0, 1, cplx(0, -1)) + monomial(2, 1, 4, -0.2));
}

TEST(PluriharmonicSupport, RejectsNonModelsAndOffsetBase) {
  const Domain b = builtin_domain("ball");
  EXPECT_THROW(pluriharmonic_support(b, origin(b), 0.1), DomainError);
  const Domain d = builtin_domain("paper-model");
  CVec z = origin(d);
  z(0) = 0.5;
  EXPECT_THROW(pluriharmonic_support(d, z, 0.1), DomainError);
  const Domain mixed = Domain::from_config([] {
    DomainConfig c = builtin_domain_config("rigid-2d");
    c.defining = "y1 + x2^2*y2^2";
    return c;
  }());
  EXPECT_THROW(pluriharmonic_support(mixed, origin(mixed), 0.1), DomainError);
}

TEST(PluriharmonicSupport, HolomorphicWithPluriharmonicRealPart) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = pluriharmonic_support(d, origin(d), 0.1);
  EXPECT_TRUE(sd.S.is_holomorphic());
  EXPECT_EQ(sd.S.eval(as_span(origin(d))), cplx(0.0));
  const CxPolynomial re = HermitianPolynomial::real_part_of(sd.S).inner();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      EXPECT_TRUE(re.derivative(j, Wirtinger::Holomorphic).derivative(k, Wirtinger::Antiholomorphic).is_zero());
}

TEST(Est1, ModelE2PaperSignMatchesPhaseOracle) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = pluriharmonic_support(d, origin(d), 0.1);
  const EstimateReport r = verify_est1(sd, d, unit(3, 1), 0.3, 10000, 1);
  // margin / |w2|^4 = cos^4 + 0.1 cos 4phi - eps'
  const double mn = phase_min(4, 0.1, 4);
  double expect = 0.0;
  for (int i = 0; i <= 20 && expect == 0.0; ++i)
    if (std::ldexp(1.0, -i) <= mn) expect = std::ldexp(1.0, -i);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.fitted_constants.at("eps_prime"), expect);
  EXPECT_GE(r.min_margin, -1e-12);
}

TEST(Est1, ModelE3FailsForBothSigns) {
  const Domain d = builtin_domain("paper-model");
  // the Re^6 part: cos^6 -+ 0.1 cos 6phi goes negative for either sign
  EXPECT_LT(phase_min(6, -0.1, 6), 0.0);
  EXPECT_LT(phase_min(6, 0.1, 6), 0.0);
  for (SignChoice s : {SignChoice::Paper, SignChoice::Flipped}) {
    const EstimateReport r = verify_est1(pluriharmonic_support(d, origin(d), 0.1, s), d, unit(3, 2), 0.3, 10000, 2);
    EXPECT_FALSE(r.pass) << to_string(s);
    EXPECT_LT(r.fitted_constants.at("margin_at_zero"), -1e-12);
  }
}

TEST(Est1, SmallCorrectionPassesOnBothSlices) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = pluriharmonic_support(d, origin(d), 1e-3);
  for (int k : {1, 2}) EXPECT_TRUE(verify_est1(sd, d, unit(3, k), 0.3, 4000, 3).pass) << k;
}

TEST(Est1, HalfSpaceMarginIsZero) {
  const Domain d = builtin_domain("half-space");
  const EstimateReport r = verify_est1(pluriharmonic_support(d, origin(d), 0.1), d, unit(d.nvars(), 1), 0.3, 500, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.fitted_constants.at("eps_prime"), 1.0);
  EXPECT_NEAR(r.min_margin, 0.0, 1e-15);
}

TEST(Est1, BallLinearSupportIsStrictlyConvex) {
  // rho - Re S = |z - e1|^2 = |w1|^2 + |w2|^2 and ||P^2|| = 1: eps' = 1 with margin |w1|^2 >= 0
  const Domain d = builtin_domain("ball");
  const CVec e1 = unit(3, 0);
  const SupportData sd = linear_support(d, e1);
  EXPECT_NEAR(std::abs(sd.S.eval(as_span(e1))), 0.0, 1e-15);
  const EstimateReport r = verify_est1(sd, d, unit(3, 1), 0.3, 2000, 5);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.fitted_constants.at("eps_prime"), 1.0);
  EXPECT_GE(r.min_margin, -1e-12);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const CVec z = e1 + random_in_ball(3, 0.5, rng);
    EXPECT_NEAR(d.value(z) - sd.S.eval(as_span(z)).real(), (z - e1).squaredNorm(), 1e-12);
  }
}

TEST(Est1, Rigid2dDefaultCorrection) {
  const Domain d = builtin_domain("rigid-2d");
  const EstimateReport r = verify_est1(pluriharmonic_support(d, origin(d), 0.1), d, unit(2, 1), 0.3, 4000, 7);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.fitted_constants.at("eps_prime"), 0.0);
}

TEST(Est1, Reproducible) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = pluriharmonic_support(d, origin(d), 0.1);
  const nlohmann::json a = verify_est1(sd, d, unit(3, 1), 0.3, 500, 8);
  const nlohmann::json b = verify_est1(sd, d, unit(3, 1), 0.3, 500, 8);
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Leray, Monomials) {
  SupportData sd;
  sd.zeta = CVec::Zero(3);
  sd.S = monomial(3, 0, 1, cplx(0, -1));
  sd = leray_decompose(sd);
  EXPECT_EQ(sd.Q[0], CxPolynomial::constant(3, cplx(0, -1)));
  EXPECT_TRUE(sd.Q[1].is_zero() && sd.Q[2].is_zero());
  sd.S = monomial(3, 1, 4, 1.0);
  sd = leray_decompose(sd);
  EXPECT_TRUE(sd.Q[0].is_zero() && sd.Q[2].is_zero());
  EXPECT_EQ(sd.Q[1], monomial(3, 1, 3, 1.0));
}

TEST(Leray, ModelSupportExact) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = leray_decompose(pluriharmonic_support(d, origin(d), 0.1));
  EXPECT_EQ(sd.Q[0], CxPolynomial::constant(3, cplx(0, -1)));
  EXPECT_EQ(sd.Q[1], monomial(3, 1, 3, -0.1));
  EXPECT_EQ(sd.Q[2], monomial(3, 2, 5, 0.1));
  EXPECT_TRUE(leray_residual(sd).is_zero());
  for (const auto& q : sd.Q) EXPECT_TRUE(q.is_holomorphic());
}

TEST(Leray, OffsetBasePoint) {
  SupportData sd;
  sd.zeta = from_list({cplx(0.3, -0.2), cplx(-0.5, 0.1)});
  // S = (z1 - a)(z2 + z1^2) + (z2 - b)^3, zeta = (a, b)
  const CxPolynomial z1 = CxPolynomial::variable(2, 0), z2 = CxPolynomial::variable(2, 1);
  const CxPolynomial a = CxPolynomial::constant(2, sd.zeta(0)), b = CxPolynomial::constant(2, sd.zeta(1));
  sd.S = (z1 - a) * (z2 + z1 * z1) + (z2 - b).pow(3);
  sd = leray_decompose(sd);
  EXPECT_LT(leray_residual(sd).norm(), 1e-14);
  EXPECT_EQ(sd.Q[1].derivative(0, Wirtinger::Holomorphic), CxPolynomial(2));
}

TEST(Leray, NonVanishingBaseValueThrows) {
  SupportData sd;
  sd.zeta = CVec::Zero(2);
  sd.S = CxPolynomial::variable(2, 0) + CxPolynomial::constant(2, 1.0);
  EXPECT_THROW(leray_decompose(sd), DomainError);
}

TEST(LemmaES, HalfSpaceConstantsAreStable) {
  const Domain d = builtin_domain("half-space");
  const SupportData sd = pluriharmonic_support(d, origin(d), 0.0);
  const EstimateReport r = verify_lemma_ES(sd, d, 20, {1e-2, 1e-3, 1e-4}, 9);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.fitted_constants.at("c1"), 0.0);
  EXPECT_LT(r.fitted_constants.at("c1_spread"), 4.0);
  EXPECT_LT(r.fitted_constants.at("c2_spread"), 4.0);
  // |S(z, 0)| = |z1| >= |Im z1| = |rho(z)|
  EXPECT_GE(r.fitted_constants.at("c2"), 1.0 - 1e-9);
}

TEST(LemmaES, ModelConstantsBoundedAway) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = pluriharmonic_support(d, origin(d), 1e-3);
  const EstimateReport r = verify_lemma_ES(sd, d, 10, {1e-2, 1e-3, 1e-4}, 10);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.fitted_constants.at("c1"), 0.0);
  EXPECT_GT(r.fitted_constants.at("c2"), 0.0);
}

TEST(LemmaEQ, HalfSpaceClosedForm) {
  const Domain d = builtin_domain("half-space");
  const SupportData sd = leray_decompose(pluriharmonic_support(d, origin(d), 0.0));
  for (double eps : {1e-2, 1e-4}) {
    const EstimateReport r = verify_lemma_EQ(sd, d, origin(d), eps, 50, 11);
    EXPECT_NEAR(r.fitted_constants.at("K_1"), 1.0, 1e-9);
    for (const auto& [name, v] : r.fitted_constants)
      if (name != "K_1" && name != "fd_rel_err") EXPECT_NEAR(v, 0.0, 1e-12) << name;
    EXPECT_TRUE(r.pass);
  }
}

TEST(LemmaEQ, ModelFiniteAndDerivativesConsistent) {
  const Domain d = builtin_domain("paper-model");
  const SupportData sd = leray_decompose(pluriharmonic_support(d, origin(d), 1e-3));
  const EstimateReport r = verify_lemma_EQ(sd, d, origin(d), 1e-4, 100, 12);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.fitted_constants.at("fd_rel_err"), 1e-6);
  for (const auto& [name, v] : r.fitted_constants) EXPECT_TRUE(std::isfinite(v)) << name;
}
