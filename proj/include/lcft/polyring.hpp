#pragma once
// Sparse polynomials in z_1..z_n and their conjugates with complex double
// coefficients. A term z^alpha zbar^beta is keyed by the concatenated exponent
// vector (alpha, beta); terms are ordered graded-lexicographically.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcft/error.hpp"

namespace lcft {

using cplx = std::complex<double>;

/// Exponents of one monomial z^alpha zbar^beta, stored as [alpha..., beta...].
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int nvars) : exps_(static_cast<size_t>(2 * nvars), 0) {}
  Monomial(std::vector<int> alpha, const std::vector<int>& beta) : exps_(std::move(alpha)) {
    if (exps_.size() != beta.size()) throw DimensionError("alpha/beta length mismatch");
    exps_.insert(exps_.end(), beta.begin(), beta.end());
  }

  int nvars() const { return static_cast<int>(exps_.size() / 2); }
  int alpha(int j) const { return exps_[static_cast<size_t>(j)]; }
  int beta(int j) const { return exps_[static_cast<size_t>(nvars() + j)]; }
  int& alpha(int j) { return exps_[static_cast<size_t>(j)]; }
  int& beta(int j) { return exps_[static_cast<size_t>(nvars() + j)]; }

  std::vector<int> alphas() const { return {exps_.begin(), exps_.begin() + nvars()}; }
  std::vector<int> betas() const { return {exps_.begin() + nvars(), exps_.end()}; }

  int holomorphic_degree() const {
    int d = 0;
    for (int j = 0; j < nvars(); ++j) d += alpha(j);
    return d;
  }
  int antiholomorphic_degree() const {
    int d = 0;
    for (int j = 0; j < nvars(); ++j) d += beta(j);
    return d;
  }
  int degree() const { return holomorphic_degree() + antiholomorphic_degree(); }

  /// Swap alpha and beta: the monomial of the complex conjugate.
  Monomial conjugate() const {
    Monomial m(nvars());
    for (int j = 0; j < nvars(); ++j) {
      m.alpha(j) = beta(j);
      m.beta(j) = alpha(j);
    }
    return m;
  }

  Monomial operator*(const Monomial& o) const {
    Monomial m = *this;
    for (size_t i = 0; i < exps_.size(); ++i) m.exps_[i] += o.exps_[i];
    return m;
  }

  const std::vector<int>& exponents() const { return exps_; }
  bool operator==(const Monomial&) const = default;

 private:
  std::vector<int> exps_;
};

inline std::string to_string(const Monomial& m) {
  std::ostringstream os;
  os << "(alpha=[";
  for (int j = 0; j < m.nvars(); ++j) os << (j ? "," : "") << m.alpha(j);
  os << "], beta=[";
  for (int j = 0; j < m.nvars(); ++j) os << (j ? "," : "") << m.beta(j);
  os << "])";
  return os.str();
}

/// Hermitian symmetry violated; carries the offending monomial pair.
class NonRealError : public Error {
 public:
  NonRealError(const std::string& what, Monomial first, Monomial second)
      : Error(what + ": coefficient at " + to_string(first) + " is not the conjugate of the one at " +
              to_string(second)),
        first_(std::move(first)),
        second_(std::move(second)) {}
  const Monomial& first() const { return first_; }
  const Monomial& second() const { return second_; }

 private:
  Monomial first_, second_;
};

/// Graded lexicographic order: total degree first, then exponents with the
/// larger leading exponent first.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exponents() > b.exponents();
  }
};

enum class Wirtinger { Holomorphic, Antiholomorphic };

class CxPolynomial {
 public:
  using TermMap = std::map<Monomial, cplx, GradedLex>;

  CxPolynomial() : nvars_(1) {}
  explicit CxPolynomial(int nvars) : nvars_(nvars) {
    if (nvars <= 0) throw DimensionError("polynomial needs at least one variable");
  }

  static CxPolynomial constant(int nvars, cplx c) {
    CxPolynomial p(nvars);
    p.add_term(Monomial(nvars), c);
    return p;
  }
  /// z_j (0-based index).
  static CxPolynomial variable(int nvars, int j) {
    check_index(nvars, j);
    Monomial m(nvars);
    m.alpha(j) = 1;
    CxPolynomial p(nvars);
    p.add_term(m, 1.0);
    return p;
  }
  /// conj(z_j).
  static CxPolynomial conj_variable(int nvars, int j) {
    check_index(nvars, j);
    Monomial m(nvars);
    m.beta(j) = 1;
    CxPolynomial p(nvars);
    p.add_term(m, 1.0);
    return p;
  }

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  cplx coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? cplx{} : it->second;
  }

  void add_term(const Monomial& m, cplx c) {
    if (m.nvars() != nvars_) throw DimensionError("monomial arity does not match polynomial");
    if (c == cplx{}) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx{}) terms_.erase(it);
    }
  }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  /// Lowest total degree of a stored term; 0 for the zero polynomial.
  int lowest_degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }

  CxPolynomial homogeneous_part(int j) const {
    CxPolynomial out(nvars_);
    for (const auto& [m, c] : terms_)
      if (m.degree() == j) out.terms_.emplace(m, c);
    return out;
  }

  bool is_holomorphic() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.first.antiholomorphic_degree() == 0; });
  }

  /// Coefficientwise conjugate of the function: conj(p(z)).
  CxPolynomial conjugate() const {
    CxPolynomial out(nvars_);
    for (const auto& [m, c] : terms_) out.terms_.emplace(m.conjugate(), std::conj(c));
    return out;
  }

  /// Largest |a_{ab} - conj(a_{ba})| over all monomial pairs, with the pair.
  std::pair<double, Monomial> hermitian_defect() const {
    double worst = 0.0;
    Monomial where(nvars_);
    for (const auto& [m, c] : terms_) {
      const double e = std::abs(c - std::conj(coefficient(m.conjugate())));
      if (e > worst) {
        worst = e;
        where = m;
      }
    }
    return {worst, where};
  }

  /// Sum of absolute coefficient values.
  double norm() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s += std::abs(c);
    return s;
  }

  /// Drop terms with |c| <= tol.
  CxPolynomial pruned(double tol) const {
    CxPolynomial out(nvars_);
    for (const auto& [m, c] : terms_)
      if (std::abs(c) > tol) out.terms_.emplace(m, c);
    return out;
  }

  CxPolynomial& operator+=(const CxPolynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  CxPolynomial& operator-=(const CxPolynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  CxPolynomial& operator*=(cplx s) {
    if (s == cplx{}) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      if (it->second == cplx{}) it = terms_.erase(it);
      else ++it;
    }
    return *this;
  }
  friend CxPolynomial operator+(CxPolynomial a, const CxPolynomial& b) { return a += b; }
  friend CxPolynomial operator-(CxPolynomial a, const CxPolynomial& b) { return a -= b; }
  friend CxPolynomial operator*(CxPolynomial a, cplx s) { return a *= s; }
  friend CxPolynomial operator*(cplx s, CxPolynomial a) { return a *= s; }
  CxPolynomial operator-() const { return *this * cplx(-1.0); }

  friend CxPolynomial operator*(const CxPolynomial& a, const CxPolynomial& b) {
    a.check_same(b);
    CxPolynomial out(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }

  CxPolynomial pow(int k) const {
    if (k < 0) throw DomainError("negative polynomial power");
    CxPolynomial result = constant(nvars_, 1.0), base = *this;
    while (k > 0) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return result;
  }

  bool operator==(const CxPolynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  /// Evaluate at z, using power tables of z_j and conj(z_j).
  cplx eval(std::span<const cplx> z) const {
    if (static_cast<int>(z.size()) != nvars_)
      throw DimensionError("evaluation point has dimension " + std::to_string(z.size()) +
                           ", polynomial has " + std::to_string(nvars_) + " variables");
    const int d = degree();
    std::vector<cplx> pw(static_cast<size_t>(nvars_ * (d + 1))), pwc(pw.size());
    for (int j = 0; j < nvars_; ++j) {
      cplx a = 1.0, b = 1.0;
      for (int e = 0; e <= d; ++e) {
        pw[static_cast<size_t>(j * (d + 1) + e)] = a;
        pwc[static_cast<size_t>(j * (d + 1) + e)] = b;
        a *= z[static_cast<size_t>(j)];
        b *= std::conj(z[static_cast<size_t>(j)]);
      }
    }
    cplx s{};
    for (const auto& [m, c] : terms_) {
      cplx t = c;
      for (int j = 0; j < nvars_; ++j) {
        if (m.alpha(j)) t *= pw[static_cast<size_t>(j * (d + 1) + m.alpha(j))];
        if (m.beta(j)) t *= pwc[static_cast<size_t>(j * (d + 1) + m.beta(j))];
      }
      s += t;
    }
    return s;
  }
  cplx eval(std::initializer_list<cplx> z) const { return eval(std::span<const cplx>(z.begin(), z.size())); }

  /// Formal d/dz_j or d/dzbar_j.
  CxPolynomial derivative(int j, Wirtinger kind) const {
    check_index(nvars_, j);
    CxPolynomial out(nvars_);
    for (const auto& [m, c] : terms_) {
      const int e = kind == Wirtinger::Holomorphic ? m.alpha(j) : m.beta(j);
      if (e == 0) continue;
      Monomial d = m;
      (kind == Wirtinger::Holomorphic ? d.alpha(j) : d.beta(j)) -= 1;
      out.add_term(d, c * static_cast<double>(e));
    }
    return out;
  }

  /// p(b + M w): b has nvars entries, M is nvars x k (row-major rows[j][l]).
  /// Conjugate variables receive the conjugated map.
  CxPolynomial compose_affine(std::span<const cplx> b, const std::vector<std::vector<cplx>>& M) const {
    if (static_cast<int>(b.size()) != nvars_ || static_cast<int>(M.size()) != nvars_)
      throw DimensionError("affine map must have " + std::to_string(nvars_) + " rows");
    const int k = M.empty() ? 0 : static_cast<int>(M[0].size());
    if (k <= 0) throw DimensionError("affine map must have at least one column");
    for (const auto& row : M)
      if (static_cast<int>(row.size()) != k) throw DimensionError("ragged affine map");

    // powers[j][e] = (b_j + M_j w)^e, cpowers the conjugate.
    std::vector<std::vector<CxPolynomial>> powers(static_cast<size_t>(nvars_)), cpowers(powers.size());
    std::vector<int> need_a(static_cast<size_t>(nvars_), 0), need_b(static_cast<size_t>(nvars_), 0);
    for (const auto& [m, c] : terms_)
      for (int j = 0; j < nvars_; ++j) {
        need_a[static_cast<size_t>(j)] = std::max(need_a[static_cast<size_t>(j)], m.alpha(j));
        need_b[static_cast<size_t>(j)] = std::max(need_b[static_cast<size_t>(j)], m.beta(j));
      }
    for (int j = 0; j < nvars_; ++j) {
      CxPolynomial lin = constant(k, b[static_cast<size_t>(j)]);
      for (int l = 0; l < k; ++l)
        lin += variable(k, l) * M[static_cast<size_t>(j)][static_cast<size_t>(l)];
      const CxPolynomial clin = lin.conjugate();
      auto& pj = powers[static_cast<size_t>(j)];
      auto& cj = cpowers[static_cast<size_t>(j)];
      pj.push_back(constant(k, 1.0));
      cj.push_back(constant(k, 1.0));
      for (int e = 1; e <= need_a[static_cast<size_t>(j)]; ++e) pj.push_back(pj.back() * lin);
      for (int e = 1; e <= need_b[static_cast<size_t>(j)]; ++e) cj.push_back(cj.back() * clin);
    }
    CxPolynomial out(k);
    for (const auto& [m, c] : terms_) {
      CxPolynomial t = constant(k, c);
      for (int j = 0; j < nvars_; ++j) {
        if (m.alpha(j)) t = t * powers[static_cast<size_t>(j)][static_cast<size_t>(m.alpha(j))];
        if (m.beta(j)) t = t * cpowers[static_cast<size_t>(j)][static_cast<size_t>(m.beta(j))];
      }
      out += t;
    }
    return out;
  }

  /// Re-embed into a larger variable set: variable j goes to slot map[j].
  CxPolynomial embed(int new_nvars, std::span<const int> map) const {
    if (static_cast<int>(map.size()) != nvars_) throw DimensionError("embedding map size mismatch");
    CxPolynomial out(new_nvars);
    for (const auto& [m, c] : terms_) {
      Monomial e(new_nvars);
      for (int j = 0; j < nvars_; ++j) {
        const int t = map[static_cast<size_t>(j)];
        check_index(new_nvars, t);
        e.alpha(t) += m.alpha(j);
        e.beta(t) += m.beta(j);
      }
      out.add_term(e, c);
    }
    return out;
  }

 private:
  static void check_index(int nvars, int j) {
    if (j < 0 || j >= nvars)
      throw DimensionError("variable index " + std::to_string(j) + " out of range for " +
                           std::to_string(nvars) + " variables");
  }
  void check_same(const CxPolynomial& o) const {
    if (o.nvars_ != nvars_) throw DimensionError("polynomials have different numbers of variables");
  }

  int nvars_;
  TermMap terms_;
};

/// Real-valued polynomial: coefficient at (alpha, beta) is the conjugate of the
/// coefficient at (beta, alpha).
class HermitianPolynomial {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  HermitianPolynomial() = default;
  explicit HermitianPolynomial(CxPolynomial p) : inner_(std::move(p)) {
    const auto [defect, where] = inner_.hermitian_defect();
    if (defect > kSymmetryTol * std::max(1.0, inner_.norm()))
      throw NonRealError("polynomial is not real-valued", where, where.conjugate());
  }

  /// Average p with its conjugate; always Hermitian.
  static HermitianPolynomial real_part_of(const CxPolynomial& p) {
    return HermitianPolynomial((p + p.conjugate()) * cplx(0.5));
  }

  const CxPolynomial& inner() const { return inner_; }
  int nvars() const { return inner_.nvars(); }
  int degree() const { return inner_.degree(); }
  double eval(std::span<const cplx> z) const { return inner_.eval(z).real(); }
  double eval(std::initializer_list<cplx> z) const { return inner_.eval(z).real(); }
  bool operator==(const HermitianPolynomial&) const = default;

 private:
  CxPolynomial inner_;
};

inline double poly_norm(const CxPolynomial& p) { return p.norm(); }

inline CxPolynomial wirtinger_derivative(const CxPolynomial& p, int j, Wirtinger kind) {
  return p.derivative(j, kind);
}

// JSON: {"nvars": n, "terms": [{"alpha": [...], "beta": [...], "re": x, "im": y}]}
inline nlohmann::json to_json(const CxPolynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : p.terms())
    terms.push_back({{"alpha", m.alphas()}, {"beta", m.betas()}, {"re", c.real()}, {"im", c.imag()}});
  return {{"nvars", p.nvars()}, {"terms", terms}};
}

inline CxPolynomial polynomial_from_json(const nlohmann::json& j) {
  const int n = j.at("nvars").get<int>();
  CxPolynomial p(n);
  for (const auto& t : j.at("terms")) {
    Monomial m(t.at("alpha").get<std::vector<int>>(), t.at("beta").get<std::vector<int>>());
    if (m.nvars() != n) throw DimensionError("term arity does not match nvars");
    p.add_term(m, {t.at("re").get<double>(), t.value("im", 0.0)});
  }
  return p;
}

}  // namespace lcft
