#include <cmath>

#include <gtest/gtest.h>

#include "lcft/domain.hpp"

using namespace lcft;

namespace {

const cplx I(0, 1);

Domain model() { return builtin_domain("paper-model"); }
Domain half_space() { return builtin_domain("half-space"); }
Domain ball() { return builtin_domain("ball"); }

// Central differences of rho in real coordinates (x1, y1, x2, y2, ...).
Eigen::VectorXd fd_gradient(const Domain& d, const CVec& z, double h = 1e-6) {
  const int n = d.nvars();
  Eigen::VectorXd g(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    CVec e = CVec::Zero(n);
    e(k / 2) = (k % 2 == 0) ? cplx(h, 0) : cplx(0, h);
    g(k) = (d.value(z + e) - d.value(z - e)) / (2 * h);
  }
  return g;
}

double parallel_angle(const CVec& a, const CVec& b) {
  // angle between real vectors underlying a and b
  const double c = std::real(inner(a, b)) / (a.norm() * b.norm());
  return std::acos(std::clamp(std::abs(c), -1.0, 1.0));
}

void expect_frame_invariants(const Domain& d, const BoundaryFrame& f) {
  EXPECT_NEAR(f.normal.norm(), 1.0, 1e-12);
  const CVec drho = d.dz(f.zeta);
  ASSERT_EQ(static_cast<int>(f.tangent_basis.size()), d.nvars() - 1);
  for (size_t a = 0; a < f.tangent_basis.size(); ++a) {
    const CVec& t = f.tangent_basis[a];
    // complex tangency: sum_j t_j d rho / d z_j = 0
    EXPECT_LT(std::abs(t.cwiseProduct(drho).sum()) / drho.norm(), 1e-10);
    EXPECT_LT(std::abs(inner(t, f.normal)), 1e-12);
    for (size_t b = 0; b < f.tangent_basis.size(); ++b)
      EXPECT_NEAR(std::abs(inner(t, f.tangent_basis[b])), a == b ? 1.0 : 0.0, 1e-12);
  }
}

}  // namespace

TEST(Domain, RejectsDegreeAboveTwoM) {
  DomainConfig c;
  c.defining = "y1 + x2^4";
  c.m = 1;
  EXPECT_THROW(Domain::from_config(c), Error);
}

TEST(Domain, RejectsAnchorOutside) {
  DomainConfig c;
  c.defining = "y1";
  c.nvars = 2;
  c.anchor = {I, 0.0};
  EXPECT_THROW(Domain::from_config(c), DomainError);
}

TEST(Domain, BuiltinCatalog) {
  const auto cat = builtin_domains();
  EXPECT_GE(cat.size(), 4u);
  EXPECT_EQ(model().rho().degree(), 10);
  EXPECT_EQ(model().nvars(), 3);
  EXPECT_EQ(half_space().nvars(), 3);
  EXPECT_EQ(builtin_domain("rigid-2d").nvars(), 2);
  EXPECT_THROW(builtin_domain("nope"), DomainError);
}

TEST(Domain, RealGradientMatchesFiniteDifferences) {
  const Domain d = model();
  Rng rng(7);
  for (int s = 0; s < 20; ++s) {
    const CVec z = random_in_ball(3, 0.8, rng);
    const CVec g = d.real_gradient(z);
    const Eigen::VectorXd fd = fd_gradient(d, z);
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(g(j).real(), fd(2 * j), 1e-6);
      EXPECT_NEAR(g(j).imag(), fd(2 * j + 1), 1e-6);
    }
  }
}

TEST(Domain, RealHessianMatchesFiniteDifferences) {
  const Domain d = model();
  Rng rng(8);
  const double h = 1e-5;
  for (int s = 0; s < 10; ++s) {
    const CVec z = random_in_ball(3, 0.8, rng);
    const Eigen::MatrixXd H = d.real_hessian(z);
    for (int k = 0; k < 6; ++k) {
      CVec e = CVec::Zero(3);
      e(k / 2) = (k % 2 == 0) ? cplx(h, 0) : cplx(0, h);
      const Eigen::VectorXd col = (fd_gradient(d, z + e) - fd_gradient(d, z - e)) / (2 * h);
      for (int r = 0; r < 6; ++r) EXPECT_NEAR(H(r, k), col(r), 1e-4 * (1 + std::abs(H(r, k))));
    }
  }
}

TEST(FrameAt, ModelDomainAtOrigin) {
  const Domain d = model();
  const BoundaryFrame f = d.frame_at(CVec::Zero(3));
  EXPECT_NEAR(std::abs(f.normal(0) - I), 0.0, 1e-15);
  ASSERT_EQ(f.tangent_basis.size(), 2u);
  EXPECT_NEAR(std::abs(f.tangent_basis[0](1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(f.tangent_basis[1](2)), 1.0, 1e-15);
  expect_frame_invariants(d, f);
}

TEST(FrameAt, HalfSpaceIsExact) {
  const Domain d = half_space();
  const BoundaryFrame f = d.frame_at(CVec::Zero(3));
  EXPECT_EQ(f.normal, I * unit(3, 0));
  EXPECT_EQ(f.tangent_basis[0], unit(3, 1));
  EXPECT_EQ(f.tangent_basis[1], unit(3, 2));
}

TEST(FrameAt, BallAtPole) {
  const Domain d = ball();
  const BoundaryFrame f = d.frame_at(unit(3, 0));
  EXPECT_NEAR((f.normal - unit(3, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((f.tangent_basis[0] - unit(3, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((f.tangent_basis[1] - unit(3, 2)).norm(), 0.0, 1e-15);
}

TEST(FrameAt, RejectsInteriorPoint) { EXPECT_THROW(model().frame_at(-0.1 * I * unit(3, 0)), DomainError); }

TEST(FrameAt, RejectsDegeneratePoint) {
  DomainConfig c;
  c.defining = "x1^2 + y1^2 + x2^2 + y2^2 - 1";
  c.anchor = {0.5, 0.0};
  c.m = 1;
  const Domain d = Domain::from_config(c);
  // the gradient vanishes at the center
  EXPECT_THROW(d.level_frame(CVec::Zero(2)), DomainError);
}

TEST(FrameAt, InvariantsOnRandomBoundaryPoints) {
  for (const char* name : {"paper-model", "half-space", "ball", "rigid-2d"}) {
    const Domain d = builtin_domain(name);
    Rng rng(11);
    for (const CVec& p : d.sample_boundary(100, rng)) {
      ASSERT_LT(std::abs(d.value(p)), 1e-12) << name;
      expect_frame_invariants(d, d.frame_at(p));
    }
  }
}

TEST(ProjectToBoundary, HalfSpace) {
  const Domain d = half_space();
  const CVec p = d.project_to_boundary(-0.01 * I * unit(3, 0));
  EXPECT_LT(p.norm(), 1e-15);
}

TEST(ProjectToBoundary, BallIsRadial) {
  const Domain d = ball();
  const CVec p = d.project_to_boundary(0.97 * unit(3, 0));
  EXPECT_LT((p - unit(3, 0)).norm(), 1e-14);
}

TEST(ProjectToBoundary, ModelDomainResidualAndParallelism) {
  const Domain d = model();
  const CVec z = from_list({-0.01 * I, 0.1, 0.0});
  const CVec p = d.project_to_boundary(z);
  EXPECT_LT(std::abs(d.value(p)), 1e-12);
  EXPECT_LT(parallel_angle(z - p, d.real_gradient(p)), 1e-6);
  EXPECT_LT((z - p).norm(), 0.0101);
}

TEST(ProjectToBoundary, IdempotentAndOrthogonalOnRandomPoints) {
  for (const char* name : {"paper-model", "ball", "rigid-2d"}) {
    const Domain d = builtin_domain(name);
    Rng rng(12);
    for (const CVec& z : d.sample_near_boundary(50, 1e-4, 0.05, rng)) {
      const CVec p = d.project_to_boundary(z);
      EXPECT_LT(std::abs(d.value(p)), 1e-12) << name;
      EXPECT_LT(parallel_angle(z - p, d.real_gradient(p)), 1e-6) << name;
      EXPECT_LT((d.project_to_boundary(p) - p).norm(), 1e-10) << name;
    }
  }
}

TEST(ProjectToBoundary, FarPointIsRejected) {
  const Domain d = half_space();
  EXPECT_THROW(d.project_to_boundary(-2.0 * I * unit(3, 0)), DomainError);
}

TEST(ConvexityProbe, HalfSpaceTangentPlaneIsFlat) {
  Rng rng(1);
  const auto rep = half_space().lineal_convexity_probe(CVec::Zero(3), 500, rng);
  EXPECT_EQ(rep.min_rho, 0.0);
  EXPECT_TRUE(rep.locally_lineally_convex);
}

TEST(ConvexityProbe, BallAndModel) {
  Rng rng(2);
  EXPECT_GE(ball().lineal_convexity_probe(unit(3, 0), 500, rng).min_rho, 0.0);
  EXPECT_GE(model().lineal_convexity_probe(CVec::Zero(3), 500, rng).min_rho, 0.0);
}

TEST(ConvexityProbe, ConvexDomainsNeverReportNegative) {
  for (const char* name : {"paper-model", "ball", "rigid-2d"}) {
    const Domain d = builtin_domain(name);
    Rng rng(3);
    for (const CVec& p : d.sample_boundary(20, rng)) {
      const auto rep = d.lineal_convexity_probe(p, 200, rng);
      EXPECT_GE(rep.min_rho, -1e-10) << name;
    }
  }
}

TEST(ConvexityProbe, DetectsNonConvexity) {
  DomainConfig c;
  c.defining = "y1 - x2^2";
  c.nvars = 2;
  c.anchor = {-I, 0.0};
  const Domain d = Domain::from_config(c);
  Rng rng(4);
  EXPECT_FALSE(d.lineal_convexity_probe(CVec::Zero(2), 200, rng).locally_lineally_convex);
}

TEST(Domain, BoundaryIsSmooth) {
  Rng rng(5);
  EXPECT_TRUE(model().boundary_is_smooth(50, rng));
}
