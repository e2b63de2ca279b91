#pragma once
// Text input for defining functions.
//
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }        divisor must be constant
//   unary   := ("+" | "-") unary | power
//   power   := primary [ "^" integer ]
//   primary := number | "i" | var | "conj" "(" expr ")" | "(" expr ")"
//   var     := ("x" | "y" | "z") ["_"] integer     1-based index
//   number  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
//
// x_j = (z_j + conj(z_j))/2 and y_j = (z_j - conj(z_j))/(2i). Arithmetic is
// carried out over the Gaussian rationals; coefficients are rounded to double
// only once the expansion is complete.

#include <cctype>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lcft/polyring.hpp"

namespace lcft {

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

struct GaussRational {
  Rational re{0}, im{0};
  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational operator+(const GaussRational& o) const { return {re + o.re, im + o.im}; }
  GaussRational operator-(const GaussRational& o) const { return {re - o.re, im - o.im}; }
  GaussRational operator*(const GaussRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussRational operator/(const GaussRational& o) const {
    const Rational den = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / den, (im * o.re - re * o.im) / den};
  }
  GaussRational conj() const { return {re, -im}; }
  cplx to_complex() const { return {re.convert_to<double>(), im.convert_to<double>()}; }
};

class RationalPoly {
 public:
  explicit RationalPoly(int nvars) : nvars_(nvars) {}
  static RationalPoly constant(int nvars, GaussRational c) {
    RationalPoly p(nvars);
    p.add(Monomial(nvars), c);
    return p;
  }

  void add(const Monomial& m, const GaussRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }
  GaussRational constant_value() const { return terms_.empty() ? GaussRational{} : terms_.begin()->second; }

  RationalPoly operator+(const RationalPoly& o) const {
    RationalPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add(m, c);
    return r;
  }
  RationalPoly operator-(const RationalPoly& o) const {
    RationalPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add(m, GaussRational{} - c);
    return r;
  }
  RationalPoly operator*(const RationalPoly& o) const {
    RationalPoly r(nvars_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) r.add(ma * mb, ca * cb);
    return r;
  }
  RationalPoly scaled(const GaussRational& s) const {
    RationalPoly r(nvars_);
    for (const auto& [m, c] : terms_) r.add(m, c * s);
    return r;
  }
  RationalPoly conj() const {
    RationalPoly r(nvars_);
    for (const auto& [m, c] : terms_) r.add(m.conjugate(), c.conj());
    return r;
  }
  CxPolynomial to_double() const {
    CxPolynomial p(nvars_);
    for (const auto& [m, c] : terms_) p.add_term(m, c.to_complex());
    return p;
  }

 private:
  int nvars_;
  std::map<Monomial, GaussRational, GradedLex> terms_;
};

inline Rational decimal_to_rational(std::string_view digits_with_dot, long exponent) {
  using boost::multiprecision::cpp_int;
  std::string digits;
  long frac = 0;
  bool after_dot = false;
  for (char ch : digits_with_dot) {
    if (ch == '.') {
      after_dot = true;
      continue;
    }
    digits.push_back(ch);
    if (after_dot) ++frac;
  }
  // cpp_int treats a leading 0 as an octal prefix.
  const auto nz = digits.find_first_not_of('0');
  digits = nz == std::string::npos ? "0" : digits.substr(nz);
  cpp_int num(digits), p10 = 1;
  exponent -= frac;
  for (long k = 0; k < std::labs(exponent); ++k) p10 *= 10;
  return exponent >= 0 ? Rational(num * p10) : Rational(num, p10);
}

class Parser {
 public:
  Parser(std::string_view src, int nvars, int max_degree)
      : src_(src), nvars_(nvars), max_degree_(max_degree) {}

  RationalPoly parse() {
    RationalPoly p = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
    return p;
  }

  /// Highest 1-based variable index mentioned in src (0 if none).
  static int scan_max_index(std::string_view src) {
    int best = 0;
    for (size_t i = 0; i < src.size(); ++i) {
      const char c = src[i];
      if ((c == 'x' || c == 'y' || c == 'z') && (i == 0 || !std::isalpha(static_cast<unsigned char>(src[i - 1])))) {
        size_t j = i + 1;
        if (j < src.size() && src[j] == '_') ++j;
        int v = 0;
        bool any = false;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          v = v * 10 + (src[j] - '0');
          any = true;
          ++j;
        }
        if (any) best = std::max(best, v);
      }
    }
    return best;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }
  void check_degree(const RationalPoly& p, size_t at) const {
    if (p.degree() > max_degree_)
      throw ParseError("degree " + std::to_string(p.degree()) + " exceeds cap " + std::to_string(max_degree_), at);
  }

  RationalPoly expr() {
    RationalPoly acc = term();
    for (;;) {
      if (accept('+')) acc = acc + term();
      else if (accept('-')) acc = acc - term();
      else return acc;
    }
  }

  RationalPoly term() {
    RationalPoly acc = unary();
    for (;;) {
      skip_ws();
      const size_t at = pos_;
      if (accept('*')) {
        acc = acc * unary();
        check_degree(acc, at);
      } else if (accept('/')) {
        const size_t dat = pos_;
        RationalPoly d = unary();
        if (!d.is_constant()) throw ParseError("division by a non-constant expression", dat);
        const GaussRational c = d.constant_value();
        if (c.is_zero()) throw ParseError("division by zero", dat);
        acc = acc.scaled(GaussRational{1, 0} / c);
      } else {
        return acc;
      }
    }
  }

  RationalPoly unary() {
    if (accept('-')) return unary().scaled({-1, 0});
    if (accept('+')) return unary();
    return power();
  }

  RationalPoly power() {
    RationalPoly base = primary();
    skip_ws();
    const size_t at = pos_;
    if (accept('^')) {
      skip_ws();
      const size_t dpos = pos_;
      long e = 0;
      bool any = false;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        e = e * 10 + (src_[pos_] - '0');
        any = true;
        ++pos_;
        if (e > 4096) throw ParseError("exponent too large", dpos);
      }
      if (!any) throw ParseError("expected a nonnegative integer exponent", dpos);
      if (static_cast<long>(base.degree()) * e > max_degree_)
        throw ParseError("degree " + std::to_string(base.degree() * e) + " exceeds cap " + std::to_string(max_degree_),
                         at);
      RationalPoly r = RationalPoly::constant(nvars_, {1, 0});
      for (long k = 0; k < e; ++k) r = r * base;
      return r;
    }
    return base;
  }

  RationalPoly primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      RationalPoly p = expr();
      expect(')');
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (src_.substr(pos_, 4) == "conj") {
      pos_ += 4;
      expect('(');
      RationalPoly p = expr();
      expect(')');
      return p.conj();
    }
    if (c == 'x' || c == 'y' || c == 'z') return variable();
    if (c == 'i' && (pos_ + 1 >= src_.size() || !std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ++pos_;
      return RationalPoly::constant(nvars_, {0, 1});
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  RationalPoly number() {
    const size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    const std::string_view mant = src_.substr(start, pos_ - start);
    if (std::count(mant.begin(), mant.end(), '.') > 1 || mant == ".") throw ParseError("malformed number", start);
    long exponent = 0;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t j = pos_ + 1;
      int sign = 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) {
        sign = src_[j] == '-' ? -1 : 1;
        ++j;
      }
      if (j >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[j])))
        throw ParseError("malformed exponent", pos_);
      long e = 0;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
        e = e * 10 + (src_[j] - '0');
        if (e > 400) throw ParseError("exponent out of range", pos_);
        ++j;
      }
      exponent = sign * e;
      pos_ = j;
    }
    return RationalPoly::constant(nvars_, {decimal_to_rational(mant, exponent), 0});
  }

  RationalPoly variable() {
    const size_t start = pos_;
    const char kind = src_[pos_++];
    if (pos_ < src_.size() && src_[pos_] == '_') ++pos_;
    int idx = 0;
    bool any = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      idx = idx * 10 + (src_[pos_] - '0');
      any = true;
      ++pos_;
    }
    if (!any || idx < 1) throw ParseError("variable needs a 1-based index", start);
    if (idx > nvars_) throw ParseError("variable index exceeds dimension " + std::to_string(nvars_), start);
    Monomial mz(nvars_), mc(nvars_);
    mz.alpha(idx - 1) = 1;
    mc.beta(idx - 1) = 1;
    RationalPoly p(nvars_);
    switch (kind) {
      case 'z':
        p.add(mz, {1, 0});
        break;
      case 'x':  // (z + zbar)/2
        p.add(mz, {Rational(1, 2), 0});
        p.add(mc, {Rational(1, 2), 0});
        break;
      default:  // y: (z - zbar)/(2i) = -i/2 z + i/2 zbar
        p.add(mz, {0, Rational(-1, 2)});
        p.add(mc, {0, Rational(1, 2)});
        break;
    }
    return p;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int nvars_;
  int max_degree_;
};

}  // namespace detail

struct ParseOptions {
  int nvars = 0;         // 0: infer from the highest index used (at least 1)
  int max_degree = 64;
};

/// Parse a possibly complex-valued polynomial expression.
inline CxPolynomial parse_polynomial(std::string_view expr, ParseOptions opts = {}) {
  const int n = std::max({1, opts.nvars, detail::Parser::scan_max_index(expr)});
  if (opts.nvars > 0 && n > opts.nvars) {
    // Re-run to report the offending variable with its offset.
    detail::Parser(expr, opts.nvars, opts.max_degree).parse();
  }
  return detail::Parser(expr, n, opts.max_degree).parse().to_double();
}

/// Parse a real-valued defining function. Rejects expressions that are not
/// Hermitian-symmetric (exactly, over the rationals).
inline HermitianPolynomial parse_defining(std::string_view expr, ParseOptions opts = {}) {
  const int n = std::max({1, opts.nvars, detail::Parser::scan_max_index(expr)});
  if (opts.nvars > 0 && n > opts.nvars) detail::Parser(expr, opts.nvars, opts.max_degree).parse();
  const detail::RationalPoly exact = detail::Parser(expr, n, opts.max_degree).parse();
  const detail::RationalPoly defect = exact - exact.conj();
  const CxPolynomial d = defect.to_double();
  if (!d.is_zero()) {
    const Monomial& m = d.terms().begin()->first;
    throw NonRealError("expression is not real-valued", m, m.conjugate());
  }
  return HermitianPolynomial(exact.to_double());
}

/// Print in the parser grammar; parse_polynomial(to_expression(p)) == p.
inline std::string to_expression(const CxPolynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  char buf[64];
  for (const auto& [m, c] : p.terms()) {
    if (!out.empty()) out += " + ";
    std::snprintf(buf, sizeof buf, "%.17g", c.real());
    std::string coef = std::string("(") + buf;
    std::snprintf(buf, sizeof buf, "%.17g", c.imag());
    coef += std::string(" + ") + buf + "*i)";
    out += coef;
    for (int j = 0; j < m.nvars(); ++j) {
      if (m.alpha(j)) {
        out += "*z" + std::to_string(j + 1);
        if (m.alpha(j) > 1) out += "^" + std::to_string(m.alpha(j));
      }
      if (m.beta(j)) {
        out += "*conj(z" + std::to_string(j + 1) + ")";
        if (m.beta(j) > 1) out += "^" + std::to_string(m.beta(j));
      }
    }
  }
  return out;
}

}  // namespace lcft
