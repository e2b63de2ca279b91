#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "lcft/holder.hpp"

using namespace lcft;

namespace {

HolderOptions small(int bases = 8) {
  HolderOptions o;
  o.n_bases = bases;
  return o;
}

HolderOptions along_e2() {
  HolderOptions o = small(4);
  o.direction = unit(3, 1);
  o.base_center = CVec::Zero(3);
  o.base_radius = 1e-3;
  return o;
}

cplx re_z2(const CVec& z) { return z(1).real(); }

}  // namespace

TEST(Holder, ConstantHasZeroNorm) {
  const Domain d = builtin_domain("ball");
  const HolderEstimate e = holder_norm(d, [](const CVec&) { return cplx(2.5, -1.0); }, 0.5, 60, 1, small());
  EXPECT_EQ(e.C_h, 0.0);
}

TEST(Holder, HalfSpaceNormalCoordinateIsLipschitzInD) {
  // d(z0, z1) >= |z1_1 - z0_1| on the grid, so |Im dz1| / d <= 1
  const Domain d = builtin_domain("half-space");
  const HolderEstimate e = holder_norm(d, [](const CVec& z) { return cplx(z(0).imag()); }, 1.0, 200, 2, small());
  EXPECT_GT(e.C_h, 0.0);
  EXPECT_LE(e.C_h, 1.0 + 1e-12);
}

TEST(Holder, BothBranchesAreExercised) {
  const Domain d = builtin_domain("half-space");
  const HolderEstimate e = holder_norm(d, [](const CVec& z) { return cplx(z(0).imag()); }, 0.5, 200, 3, small());
  EXPECT_GT(e.d_branch_fraction, 0.0);
  EXPECT_GT(e.euclid_branch_fraction, 0.0);
  EXPECT_NEAR(e.d_branch_fraction + e.euclid_branch_fraction, 1.0, 1e-15);
}

TEST(Holder, MonotoneInPairsAndPrefixStable) {
  const Domain d = builtin_domain("paper-model");
  const HolderSample big = sample_holder_pairs(d, re_z2, 160, 4, small());
  const HolderSample part = sample_holder_pairs(d, re_z2, 80, 4, small());
  for (int i = 0; i < 80; ++i) {
    EXPECT_EQ(big.pairs[static_cast<size_t>(i)].d, part.pairs[static_cast<size_t>(i)].d);
    EXPECT_EQ(big.pairs[static_cast<size_t>(i)].dh, part.pairs[static_cast<size_t>(i)].dh);
  }
  double prev = 0.0;
  for (int n = 10; n <= 160; n += 10) {
    const double c = holder_estimate(big, 0.25, n).C_h;
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(Holder, Homogeneity) {
  const Domain d = builtin_domain("paper-model");
  const HolderEstimate a = holder_norm(d, re_z2, 0.25, 80, 5, small());
  const HolderEstimate b = holder_norm(d, [](const CVec& z) { return -4.0 * re_z2(z); }, 0.25, 80, 5, small());
  EXPECT_EQ(b.C_h, 4.0 * a.C_h);
  const HolderEstimate c = holder_norm(d, [](const CVec& z) { return 3.0 * re_z2(z); }, 0.25, 80, 5, small());
  EXPECT_NEAR(c.C_h, 3.0 * a.C_h, 1e-14);
}

TEST(Holder, ThreadIndependent) {
  const Domain d = builtin_domain("ball");
  HolderOptions o = small();
  const HolderEstimate a = holder_norm(d, [](const CVec& z) { return z(1); }, 0.5, 64, 6, o);
  o.threads = 3;
  const HolderEstimate b = holder_norm(d, [](const CVec& z) { return z(1); }, 0.5, 64, 6, o);
  EXPECT_EQ(a.C_h, b.C_h);
  EXPECT_EQ(nlohmann::json(a).dump(), nlohmann::json(b).dump());
}

TEST(Holder, ModelRealZ2QuarterExponentNearOne) {
  // along e2 near 0, d ~ |Re dz2|^4 so |dh| / d^{1/4} stays of order one
  const Domain d = builtin_domain("paper-model");
  const HolderSample s = sample_holder_pairs(d, re_z2, 400, 7, along_e2());
  const double c = holder_estimate(s, 0.25, -1, false, true).C_h;
  EXPECT_GT(c, 0.5);
  EXPECT_LT(c, 2.0);
  EXPECT_GT(holder_estimate(s, 0.5, -1, false, true).C_h, 4.0 * c);
}

TEST(Holder, EuclideanBranchBoundsLipschitzFunctions) {
  // |dh| <= |dz| <= |dz|^{1 - eps_h} for |dz| <= 1, whatever mu
  const Domain d = builtin_domain("paper-model");
  const HolderSample s = sample_holder_pairs(d, re_z2, 400, 8, along_e2());
  for (double mu : {0.25, 0.5, 1.0}) EXPECT_LE(holder_estimate(s, mu).C_h, 1.0) << mu;
}

TEST(Holder, EvaluationFailureNamesThePoint) {
  const Domain d = builtin_domain("ball");
  try {
    holder_norm(d, [](const CVec&) -> cplx { throw std::runtime_error("boom"); }, 0.5, 4, 9, small());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("("), std::string::npos);
  }
}

TEST(Holder, RejectsBadExponents) {
  const Domain d = builtin_domain("ball");
  EXPECT_THROW(holder_norm(d, re_z2, 0.0, 4, 1), DomainError);
  HolderOptions o;
  o.eps_h = 1.0;
  EXPECT_THROW(holder_norm(d, re_z2, 0.5, 4, 1, o), DomainError);
}
