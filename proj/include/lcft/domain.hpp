#pragma once
// A domain D = {rho < 0} given by a real polynomial defining function, with its
// boundary geometry: normals, complex tangent frames, closest-point projection.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lcft/linalg.hpp"
#include "lcft/parser.hpp"
#include "lcft/polyring.hpp"

namespace lcft {

struct DomainConfig {
  std::string name = "custom";
  std::string defining;
  int m = 1;
  int nvars = 0;  // 0: infer from the expression
  double w0 = 0.5;
  double rmax = 10.0;
  std::vector<cplx> anchor;     // interior point used for ray shooting; default: -i e1
  std::vector<cplx> reference;  // boundary point samples cluster around; default: origin
  double sample_radius = 0.2;
  std::vector<double> bbox;  // [lo, hi] per real coordinate x1,y1,x2,y2,...; optional
};

/// Orthonormal frame at a point: real unit normal and a basis of the complex
/// tangent space T^{1,0}.
struct BoundaryFrame {
  CVec zeta;
  CVec normal;
  std::vector<CVec> tangent_basis;
};

struct ConvexityProbe {
  double min_rho = 0.0;
  CVec argmin;
  int nsamples = 0;
  bool locally_lineally_convex = true;
};

class Domain {
 public:
  Domain(HermitianPolynomial rho, int m, double w0 = 0.5, double rmax = 10.0)
      : rho_(std::move(rho)), m_(m), w0_(w0), rmax_(rmax) {
    if (m <= 0) throw DomainError("type bound m must be positive");
    if (w0 <= 0.0 || rmax <= 0.0) throw DomainError("w0 and rmax must be positive");
    if (rho_.degree() > 2 * m)
      throw DomainError("defining function has degree " + std::to_string(rho_.degree()) + " > 2m = " +
                        std::to_string(2 * m));
    const int n = nvars();
    for (int j = 0; j < n; ++j) {
      dz_.push_back(rho_.inner().derivative(j, Wirtinger::Holomorphic));
    }
    for (int j = 0; j < n; ++j) {
      std::vector<CxPolynomial> a, b;
      for (int k = 0; k < n; ++k) {
        a.push_back(dz_[j].derivative(k, Wirtinger::Holomorphic));
        b.push_back(dz_[j].derivative(k, Wirtinger::Antiholomorphic));
      }
      dzdz_.push_back(std::move(a));
      dzdzb_.push_back(std::move(b));
    }
    anchor_ = -cplx(0, 1) * unit(n, 0);
    reference_ = CVec::Zero(n);
  }

  static Domain from_config(const DomainConfig& c) {
    ParseOptions opts;
    opts.nvars = c.nvars;
    opts.max_degree = 2 * c.m + 2;
    Domain d(parse_defining(c.defining, opts), c.m, c.w0, c.rmax);
    d.name_ = c.name;
    d.expression_ = c.defining;
    d.sample_radius_ = c.sample_radius;
    const auto n = static_cast<size_t>(d.nvars());
    auto load = [&](const std::vector<cplx>& v, CVec& into, const char* what) {
      if (v.empty()) return;
      if (v.size() != n) throw DimensionError(std::string(what) + " has wrong dimension");
      into = CVec(static_cast<Eigen::Index>(n));
      for (size_t j = 0; j < n; ++j) into(static_cast<Eigen::Index>(j)) = v[j];
    };
    load(c.anchor, d.anchor_, "anchor");
    load(c.reference, d.reference_, "reference");
    if (!c.bbox.empty() && c.bbox.size() != 4 * n) throw DimensionError("bbox needs [lo, hi] per real coordinate");
    d.bbox_ = c.bbox;
    if (d.value(d.anchor_) >= 0.0) throw DomainError("anchor is not inside the domain");
    return d;
  }

  const HermitianPolynomial& rho() const { return rho_; }
  int nvars() const { return rho_.nvars(); }
  int m() const { return m_; }
  double w0() const { return w0_; }
  double rmax() const { return rmax_; }
  const std::string& name() const { return name_; }
  const std::string& expression() const { return expression_; }
  const CVec& anchor() const { return anchor_; }
  const CVec& reference() const { return reference_; }
  double sample_radius() const { return sample_radius_; }
  const std::vector<double>& bbox() const { return bbox_; }
  bool in_bbox(const CVec& z) const {
    if (bbox_.empty()) return true;
    for (int j = 0; j < nvars(); ++j) {
      const auto k = static_cast<size_t>(4 * j);
      if (z(j).real() < bbox_[k] || z(j).real() > bbox_[k + 1]) return false;
      if (z(j).imag() < bbox_[k + 2] || z(j).imag() > bbox_[k + 3]) return false;
    }
    return true;
  }
  /// Order sentinel for "infinite" contact: a degree <= 2m polynomial vanishing
  /// to order 2m+1 along a line vanishes identically on it.
  int infinite_order() const { return 2 * m_ + 1; }

  double value(const CVec& z) const { return rho_.eval(as_span(z)); }

  /// (d rho / d z_j)_j.
  CVec dz(const CVec& z) const {
    CVec g(nvars());
    for (int j = 0; j < nvars(); ++j) g(j) = dz_[static_cast<size_t>(j)].eval(as_span(z));
    return g;
  }
  /// Real gradient as a complex vector: d/dx_j + i d/dy_j = 2 d/dzbar_j.
  CVec real_gradient(const CVec& z) const { return 2.0 * dz(z).conjugate(); }

  /// Real Hessian in coordinates (x1, y1, x2, y2, ...).
  Eigen::MatrixXd real_hessian(const CVec& z) const {
    const int n = nvars();
    Eigen::MatrixXd H(2 * n, 2 * n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const cplx A = dzdz_[static_cast<size_t>(j)][static_cast<size_t>(k)].eval(as_span(z));
        const cplx B = dzdzb_[static_cast<size_t>(j)][static_cast<size_t>(k)].eval(as_span(z));
        H(2 * j, 2 * k) = 2.0 * (A.real() + B.real());
        H(2 * j + 1, 2 * k + 1) = 2.0 * (B.real() - A.real());
        H(2 * j, 2 * k + 1) = 2.0 * (B.imag() - A.imag());
        H(2 * k + 1, 2 * j) = H(2 * j, 2 * k + 1);
      }
    return H;
  }

  /// Unit normal to the level set of rho through z (outward for D).
  CVec unit_normal(const CVec& z) const {
    const CVec g = dz(z).conjugate();
    const double nrm = g.norm();
    if (!(nrm > 1e-12)) throw DomainError("gradient of the defining function vanishes (degenerate point)");
    return g / nrm;
  }

  /// Frame at any point of W0 (no boundary precondition).
  BoundaryFrame level_frame(const CVec& z) const {
    BoundaryFrame f{z, unit_normal(z), {}};
    std::vector<CVec> done{f.normal};
    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < nvars(); ++j) order.emplace_back(project_out(unit(nvars(), j), done).norm(), j);
    // Gram-Schmidt over coordinate axes in index order, skipping the axis
    // most aligned with the normal.
    const auto worst = std::min_element(order.begin(), order.end())->second;
    for (int j = 0; j < nvars(); ++j) {
      if (j == worst) continue;
      CVec v = project_out(unit(nvars(), j), done);
      v = project_out(v, done);
      v /= v.norm();
      done.push_back(v);
      f.tangent_basis.push_back(v);
    }
    return f;
  }

  BoundaryFrame frame_at(const CVec& zeta) const {
    const double scale = std::max(1.0, dz(zeta).norm());
    if (std::abs(value(zeta)) >= 1e-8 * scale) throw DomainError("frame_at: point is not on the boundary");
    return level_frame(zeta);
  }

  /// Closest boundary point to z (Lagrange-Newton on |x - z|^2 s.t. rho = 0).
  CVec project_to_boundary(const CVec& z) const {
    const int n = nvars();
    auto to_real = [n](const CVec& c) {
      Eigen::VectorXd x(2 * n);
      for (int j = 0; j < n; ++j) x(2 * j) = c(j).real(), x(2 * j + 1) = c(j).imag();
      return x;
    };
    auto to_cplx = [n](const Eigen::VectorXd& x) {
      CVec c(n);
      for (int j = 0; j < n; ++j) c(j) = {x(2 * j), x(2 * j + 1)};
      return c;
    };

    // Gradient-direction Newton onto the level set gives the starting point.
    CVec p = z;
    int it = 0;
    for (; it < 100; ++it) {
      const double r = value(p);
      const CVec g = real_gradient(p);
      const double g2 = g.squaredNorm();
      if (!(g2 > 0.0)) throw DomainError("gradient vanishes during projection");
      if (std::abs(r) < 1e-14 * std::sqrt(g2)) break;
      p -= (r / g2) * g;
    }
    if (it == 100) throw ConvergenceError("project_to_boundary: no convergence (point outside W0?)");

    const Eigen::VectorXd xz = to_real(z);
    Eigen::VectorXd x = to_real(p);
    Eigen::VectorXd grad = to_real(real_gradient(p));
    double mu = -(x - xz).dot(grad) / grad.squaredNorm();
    bool converged = false;
    for (int k = 0; k < 100; ++k) {
      const CVec pc = to_cplx(x);
      grad = to_real(real_gradient(pc));
      const double r = value(pc);
      Eigen::VectorXd F(2 * n + 1);
      F.head(2 * n) = x - xz + mu * grad;
      F(2 * n) = r;
      const double scale = std::max(1.0, (x - xz).norm());
      if (F.head(2 * n).norm() < 1e-13 * scale && std::abs(r) < 1e-13 * grad.norm()) {
        converged = true;
        break;
      }
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n + 1, 2 * n + 1);
      J.topLeftCorner(2 * n, 2 * n) = Eigen::MatrixXd::Identity(2 * n, 2 * n) + mu * real_hessian(pc);
      J.block(0, 2 * n, 2 * n, 1) = grad;
      J.block(2 * n, 0, 1, 2 * n) = grad.transpose();
      const Eigen::VectorXd step = J.fullPivLu().solve(-F);
      x += step.head(2 * n);
      mu += step(2 * n);
    }
    if (!converged) throw ConvergenceError("project_to_boundary: Lagrange iteration did not converge");
    p = to_cplx(x);
    // Final polish of the level value along the gradient.
    for (int k = 0; k < 3; ++k) {
      const CVec g = real_gradient(p);
      p -= (value(p) / g.squaredNorm()) * g;
    }
    if ((p - z).norm() > w0_) throw DomainError("project_to_boundary: point is farther than w0 from the boundary");
    return p;
  }

  /// First boundary crossing on the ray anchor + s*dir, s > 0.
  std::optional<CVec> boundary_on_ray(const CVec& from, const CVec& dir, double smax = 100.0) const {
    if (value(from) >= 0.0) throw DomainError("ray must start inside the domain");
    const CVec u = dir / dir.norm();
    double lo = 0.0, hi = 1e-3;
    while (value(from + hi * u) < 0.0) {
      lo = hi;
      hi *= 1.5;
      if (hi > smax) return std::nullopt;
    }
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      (value(from + mid * u) < 0.0 ? lo : hi) = mid;
    }
    CVec p = from + 0.5 * (lo + hi) * u;
    for (int k = 0; k < 5; ++k) {
      const CVec g = real_gradient(p);
      p -= (value(p) / g.squaredNorm()) * g;
    }
    return p;
  }

  /// Seeded boundary points near `center`: rays from the anchor through
  /// uniformly sampled points of the ball B(center, radius).
  std::vector<CVec> sample_boundary(const CVec& center, double radius, int count, Rng& rng) const {
    std::vector<CVec> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count) {
      if (++attempts > 100 * count + 100) throw DomainError("boundary sampling failed: rays do not exit the domain");
      const CVec q = center + random_in_ball(nvars(), radius, rng);
      const CVec dir = q - anchor_;
      if (dir.norm() < 1e-12) continue;
      if (auto p = boundary_on_ray(anchor_, dir)) out.push_back(*p);
    }
    return out;
  }
  std::vector<CVec> sample_boundary(int count, Rng& rng) const {
    return sample_boundary(reference_, sample_radius_, count, rng);
  }

  /// Seeded interior points within distance `depth_hi` of the boundary, pushed
  /// inward along the normal by a log-uniform depth in [depth_lo, depth_hi].
  std::vector<CVec> sample_near_boundary(int count, double depth_lo, double depth_hi, Rng& rng) const {
    std::vector<CVec> pts = sample_boundary(count, rng);
    std::uniform_real_distribution<double> u(std::log(depth_lo), std::log(depth_hi));
    for (CVec& p : pts) p -= std::exp(u(rng)) * unit_normal(p);
    return pts;
  }

  /// Checks the gradient does not vanish at sampled boundary points.
  bool boundary_is_smooth(int count, Rng& rng) const {
    for (const CVec& p : sample_boundary(count, rng))
      if (in_bbox(p) && !(dz(p).norm() > 1e-10)) return false;
    return true;
  }

  /// min rho over the complex tangent plane at zeta within radius w0.
  ConvexityProbe lineal_convexity_probe(const CVec& zeta, int nsamples, Rng& rng) const {
    const BoundaryFrame f = frame_at(zeta);
    ConvexityProbe rep;
    rep.min_rho = value(zeta);
    rep.argmin = zeta;
    const int k = static_cast<int>(f.tangent_basis.size());
    for (int s = 0; s < nsamples; ++s) {
      const CVec c = random_in_ball(k, w0_, rng);
      CVec z = zeta;
      for (int j = 0; j < k; ++j) z += c(j) * f.tangent_basis[static_cast<size_t>(j)];
      const double r = value(z);
      if (r < rep.min_rho) rep.min_rho = r, rep.argmin = z;
    }
    rep.nsamples = nsamples;
    rep.locally_lineally_convex = rep.min_rho >= -1e-10;
    return rep;
  }

 private:
  HermitianPolynomial rho_;
  int m_;
  double w0_, rmax_;
  std::string name_ = "custom";
  std::string expression_;
  std::vector<CxPolynomial> dz_;
  std::vector<std::vector<CxPolynomial>> dzdz_, dzdzb_;
  CVec anchor_, reference_;
  double sample_radius_ = 0.2;
  std::vector<double> bbox_;
};

struct BuiltinDomain {
  DomainConfig config;
  std::string description;
  std::string expected;  // documented reference values
};

inline std::vector<BuiltinDomain> builtin_domains() {
  std::vector<BuiltinDomain> out;
  {
    DomainConfig c;
    c.name = "paper-model";
    c.defining = "y1 + x2^4 + x3^6 + y3^10";
    c.m = 5;
    c.anchor = {cplx(0, -0.5), 0.0, 0.0};
    c.reference = {0.0, 0.0, 0.0};
    out.push_back({c, "convex model domain in C^3 with exceptional real lines at 0",
                   "degree 10; at 0: complex orders e2 -> 4, e3 -> 6; real orders i*e2 -> inf, i*e3 -> 10; linear type 6"});
  }
  {
    DomainConfig c;
    c.name = "half-space";
    c.defining = "y1";
    c.nvars = 3;
    c.m = 1;
    c.anchor = {cplx(0, -1), 0.0, 0.0};
    c.reference = {0.0, 0.0, 0.0};
    out.push_back({c, "flat half-space Im z1 < 0 in C^3", "tau(0, e1, eps) = eps; tangent directions capped at rmax"});
  }
  {
    DomainConfig c;
    c.name = "ball";
    c.defining = "x1^2 + y1^2 + x2^2 + y2^2 + x3^2 + y3^2 - 1";
    c.m = 1;
    c.anchor = {0.0, 0.0, 0.0};
    c.reference = {1.0, 0.0, 0.0};
    out.push_back({c, "unit ball in C^3", "at e1: normal e1, every tangent contact order 2, no exceptional lines"});
  }
  {
    DomainConfig c;
    c.name = "rigid-2d";
    c.defining = "y1 + x2^4";
    c.m = 2;
    c.anchor = {cplx(0, -0.5), 0.0};
    c.reference = {0.0, 0.0};
    out.push_back({c, "rigid domain Im z1 + (Re z2)^4 < 0 in C^2", "at 0: linear type 4; real order along i*e2 infinite"});
  }
  return out;
}

inline DomainConfig builtin_domain_config(const std::string& name) {
  for (const auto& b : builtin_domains())
    if (b.config.name == name) return b.config;
  throw DomainError("unknown builtin domain '" + name + "'");
}

inline Domain builtin_domain(const std::string& name) { return Domain::from_config(builtin_domain_config(name)); }

}  // namespace lcft
