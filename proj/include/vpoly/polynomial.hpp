#pragma once

#include <algorithm>
#include <cctype>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vpoly/errors.hpp"
#include "vpoly/exact.hpp"

namespace vpoly {

/// Polynomial variables come in three disjoint families:
///   weight  - x variables indexed by semigroup weights, printed "x[Z:3]"
///   edge    - gamma variables named after edge ids,    printed "g[e1]"
///   symbol  - reserved scalars (y, theta, x, ...),     printed bare
struct VariableKey {
  enum class Kind : std::uint8_t { weight = 0, symbol = 1, edge = 2 };

  Kind kind = Kind::symbol;
  std::string name;

  static VariableKey weight(std::string key_text) {
    return {Kind::weight, std::move(key_text)};
  }
  static VariableKey edge(std::string edge_id) { return {Kind::edge, std::move(edge_id)}; }
  static VariableKey symbol(std::string n) { return {Kind::symbol, std::move(n)}; }

  std::string text() const {
    switch (kind) {
      case Kind::weight: return "x[" + name + "]";
      case Kind::edge: return "g[" + name + "]";
      case Kind::symbol: return name;
    }
    return "?";
  }

  friend bool operator==(const VariableKey& a, const VariableKey& b) {
    return a.kind == b.kind && a.name == b.name;
  }
  friend bool operator!=(const VariableKey& a, const VariableKey& b) { return !(a == b); }
  friend bool operator<(const VariableKey& a, const VariableKey& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.name < b.name;
  }
};

inline VariableKey symbol_y() { return VariableKey::symbol("y"); }
inline VariableKey symbol_x() { return VariableKey::symbol("x"); }
inline VariableKey symbol_theta() { return VariableKey::symbol("theta"); }

/// Product of variable powers. Factors are kept sorted by key with strictly
/// positive exponents; the empty monomial is the constant 1.
class Monomial {
 public:
  using Factor = std::pair<VariableKey, int>;

  Monomial() = default;

  static Monomial unit() { return Monomial(); }

  static Monomial variable(VariableKey k, int exponent = 1) {
    Monomial m;
    if (exponent < 0) throw_error(errc::internal_check, "negative exponent");
    if (exponent > 0) m.factors_.emplace_back(std::move(k), exponent);
    return m;
  }

  static Monomial from_factors(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end(),
              [](const Factor& a, const Factor& b) { return a.first < b.first; });
    Monomial m;
    for (auto& [k, e] : factors) {
      if (e < 0) throw_error(errc::internal_check, "negative exponent");
      if (e == 0) continue;
      if (!m.factors_.empty() && m.factors_.back().first == k)
        m.factors_.back().second += e;
      else
        m.factors_.emplace_back(std::move(k), e);
    }
    return m;
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_unit() const { return factors_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [k, e] : factors_) d += e;
    return d;
  }

  int exponent_of(const VariableKey& k) const {
    for (const auto& [key, e] : factors_)
      if (key == k) return e;
    return 0;
  }

  /// Total degree contributed by one variable family.
  int degree_of_kind(VariableKey::Kind kind) const {
    int d = 0;
    for (const auto& [key, e] : factors_)
      if (key.kind == kind) d += e;
    return d;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    m.factors_.reserve(a.factors_.size() + b.factors_.size());
    std::size_t i = 0, j = 0;
    while (i < a.factors_.size() || j < b.factors_.size()) {
      if (j == b.factors_.size() ||
          (i < a.factors_.size() && a.factors_[i].first < b.factors_[j].first)) {
        m.factors_.push_back(a.factors_[i++]);
      } else if (i == a.factors_.size() || b.factors_[j].first < a.factors_[i].first) {
        m.factors_.push_back(b.factors_[j++]);
      } else {
        m.factors_.emplace_back(a.factors_[i].first, a.factors_[i].second + b.factors_[j].second);
        ++i;
        ++j;
      }
    }
    return m;
  }

  /// This monomial with the given variable removed entirely.
  Monomial without(const VariableKey& k) const {
    Monomial m;
    for (const auto& f : factors_)
      if (!(f.first == k)) m.factors_.push_back(f);
    return m;
  }

  /// Exact division by key^e; exponent must not go negative.
  Monomial divide_by(const VariableKey& k, int e) const {
    Monomial m;
    for (const auto& f : factors_) {
      if (f.first == k) {
        if (f.second < e)
          throw_error(errc::internal_check, "monomial not divisible by " + k.text());
        if (f.second > e) m.factors_.emplace_back(f.first, f.second - e);
      } else {
        m.factors_.push_back(f);
      }
    }
    if (e > 0 && exponent_of(k) == 0)
      throw_error(errc::internal_check, "monomial not divisible by " + k.text());
    return m;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.factors_ == b.factors_;
  }

  /// Graded lexicographic order used everywhere output must be canonical:
  /// higher total degree first, ties broken variable-by-variable (smaller
  /// key first, then larger exponent first).
  static int compare_graded(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db ? -1 : 1;
    std::size_t i = 0;
    for (; i < a.factors_.size() && i < b.factors_.size(); ++i) {
      if (a.factors_[i].first != b.factors_[i].first)
        return a.factors_[i].first < b.factors_[i].first ? -1 : 1;
      if (a.factors_[i].second != b.factors_[i].second)
        return a.factors_[i].second > b.factors_[i].second ? -1 : 1;
    }
    if (i < a.factors_.size()) return -1;
    if (i < b.factors_.size()) return 1;
    return 0;
  }

  std::string text() const {
    if (factors_.empty()) return "1";
    // display order: scalar symbols, then edge variables, then x variables,
    // mirroring the written form gamma_e * x_{a+b}
    auto display_rank = [](VariableKey::Kind k) {
      switch (k) {
        case VariableKey::Kind::symbol: return 0;
        case VariableKey::Kind::edge: return 1;
        case VariableKey::Kind::weight: return 2;
      }
      return 3;
    };
    std::vector<Factor> shown = factors_;
    std::stable_sort(shown.begin(), shown.end(), [&](const Factor& a, const Factor& b) {
      int ra = display_rank(a.first.kind), rb = display_rank(b.first.kind);
      if (ra != rb) return ra < rb;
      return a.first.name < b.first.name;
    });
    std::string s;
    for (std::size_t i = 0; i < shown.size(); ++i) {
      if (i) s += "*";
      s += shown[i].first.text();
      if (shown[i].second != 1) s += "^" + std::to_string(shown[i].second);
    }
    return s;
  }

 private:
  std::vector<Factor> factors_;
};

struct MonomialGradedLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return Monomial::compare_graded(a, b) < 0;
  }
};

/// Sparse multivariate polynomial with exact Gaussian-rational coefficients
/// (real rationals in every formula this library computes; the imaginary part exists so
/// exact complex edge values fold in without losing exactness). Terms are
/// kept in graded-lex order, which makes text output and numeric evaluation
/// reproducible bit-for-bit.
class SparsePolynomial {
 public:
  using TermMap = std::map<Monomial, GaussianRational, MonomialGradedLess>;

  SparsePolynomial() = default;

  static SparsePolynomial zero() { return SparsePolynomial(); }

  static SparsePolynomial constant(GaussianRational c) {
    SparsePolynomial p;
    if (!c.is_zero()) p.terms_.emplace(Monomial::unit(), std::move(c));
    return p;
  }

  static SparsePolynomial variable(VariableKey k) {
    SparsePolynomial p;
    p.terms_.emplace(Monomial::variable(std::move(k)), GaussianRational(1));
    return p;
  }

  static SparsePolynomial term(Monomial m, GaussianRational c) {
    SparsePolynomial p;
    if (!c.is_zero()) p.terms_.emplace(std::move(m), std::move(c));
    return p;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
  }
  GaussianRational constant_value() const {
    if (terms_.empty()) return GaussianRational(0);
    if (!is_constant()) throw_error(errc::internal_check, "polynomial is not constant");
    return terms_.begin()->second;
  }

  void add_term(const Monomial& m, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend SparsePolynomial operator+(const SparsePolynomial& a, const SparsePolynomial& b) {
    SparsePolynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }

  friend SparsePolynomial operator-(const SparsePolynomial& a, const SparsePolynomial& b) {
    SparsePolynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }

  friend SparsePolynomial operator-(const SparsePolynomial& a) {
    SparsePolynomial r;
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
    return r;
  }

  friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
    SparsePolynomial r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  SparsePolynomial& operator+=(const SparsePolynomial& o) { return *this = *this + o; }
  SparsePolynomial& operator-=(const SparsePolynomial& o) { return *this = *this - o; }
  SparsePolynomial& operator*=(const SparsePolynomial& o) { return *this = *this * o; }

  SparsePolynomial scaled(const GaussianRational& c) const {
    SparsePolynomial r;
    if (c.is_zero()) return r;
    for (const auto& [m, coeff] : terms_) r.terms_.emplace(m, coeff * c);
    return r;
  }

  SparsePolynomial pow(unsigned e) const {
    SparsePolynomial acc = constant(GaussianRational(1));
    SparsePolynomial b = *this;
    while (e) {
      if (e & 1u) acc *= b;
      if (e >>= 1u) b *= b;
    }
    return acc;
  }

  friend bool operator==(const SparsePolynomial& a, const SparsePolynomial& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const SparsePolynomial& a, const SparsePolynomial& b) {
    return !(a == b);
  }

  std::set<VariableKey> variables() const {
    std::set<VariableKey> vars;
    for (const auto& [m, c] : terms_)
      for (const auto& [k, e] : m.factors()) vars.insert(k);
    return vars;
  }

  /// Replace one variable by a polynomial.
  SparsePolynomial substituted(const VariableKey& key, const SparsePolynomial& replacement) const {
    SparsePolynomial r;
    std::map<int, SparsePolynomial> powers;  // replacement^n cache
    powers.emplace(0, constant(GaussianRational(1)));
    auto power = [&](int n) -> const SparsePolynomial& {
      auto it = powers.find(n);
      if (it == powers.end())
        it = powers.emplace(n, replacement.pow(static_cast<unsigned>(n))).first;
      return it->second;
    };
    for (const auto& [m, c] : terms_) {
      int e = m.exponent_of(key);
      if (e == 0) {
        r.add_term(m, c);
      } else {
        SparsePolynomial rest = term(m.without(key), c);
        r += rest * power(e);
      }
    }
    return r;
  }

  /// Substitute every variable of one family by the same polynomial
  /// (e.g. every weight variable by theta).
  SparsePolynomial substituted_kind(VariableKey::Kind kind,
                                    const SparsePolynomial& replacement) const {
    SparsePolynomial r = *this;
    for (const auto& key : variables())
      if (key.kind == kind) r = r.substituted(key, replacement);
    return r;
  }

  /// Numeric evaluation. The assignment must cover every variable; addition
  /// runs in canonical term order so results are reproducible.
  std::complex<double> eval(const std::map<VariableKey, std::complex<double>>& assignment) const {
    std::string missing;
    for (const auto& key : variables()) {
      if (!assignment.count(key)) {
        if (!missing.empty()) missing += ", ";
        missing += key.text();
      }
    }
    if (!missing.empty())
      throw_error(errc::missing_variable, "unassigned variables: " + missing);
    std::complex<double> total = 0.0;
    for (const auto& [m, c] : terms_) {
      std::complex<double> v = c.to_complex();
      for (const auto& [k, e] : m.factors()) {
        const std::complex<double> base = assignment.at(k);
        for (int i = 0; i < e; ++i) v *= base;
      }
      total += v;
    }
    return total;
  }

  /// Exact evaluation at Gaussian-rational points.
  GaussianRational eval_exact(const std::map<VariableKey, GaussianRational>& assignment) const {
    std::string missing;
    for (const auto& key : variables()) {
      if (!assignment.count(key)) {
        if (!missing.empty()) missing += ", ";
        missing += key.text();
      }
    }
    if (!missing.empty())
      throw_error(errc::missing_variable, "unassigned variables: " + missing);
    GaussianRational total(0);
    for (const auto& [m, c] : terms_) {
      GaussianRational v = c;
      for (const auto& [k, e] : m.factors())
        v *= gaussian_pow(assignment.at(k), static_cast<unsigned>(e));
      total += v;
    }
    return total;
  }

  /// Canonical text. Zero prints "0"; unit coefficients are suppressed;
  /// signs are folded into the separators.
  std::string to_text() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      GaussianRational coeff = c;
      // pull a leading minus out of real coefficients
      bool negative = coeff.is_real() && coeff.re < 0;
      if (negative) coeff = -coeff;
      if (first) {
        if (negative) s += "-";
        first = false;
      } else {
        s += negative ? " - " : " + ";
      }
      bool unit_coeff = coeff == GaussianRational(1);
      if (m.is_unit()) {
        s += gaussian_to_string(coeff);
      } else {
        if (!unit_coeff) {
          s += gaussian_to_string(coeff);
          s += "*";
        }
        s += m.text();
      }
    }
    return s;
  }

 private:
  TermMap terms_;
};

inline SparsePolynomial operator*(const GaussianRational& c, const SparsePolynomial& p) {
  return p.scaled(c);
}

// ---------------------------------------------------------------------------
// Parsing of the canonical text format (lossless round trip with to_text).
// ---------------------------------------------------------------------------

namespace detail {

class PolynomialParser {
 public:
  explicit PolynomialParser(std::string_view text) : s_(text) {}

  SparsePolynomial parse() {
    SparsePolynomial p;
    skip_ws();
    bool negative = consume('-');
    if (negative) skip_ws();
    p += parse_term(negative);
    skip_ws();
    while (!done()) {
      char sign = peek();
      if (sign != '+' && sign != '-') fail("expected '+' or '-'");
      ++pos_;
      skip_ws();
      p += parse_term(sign == '-');
      skip_ws();
    }
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw_error(errc::parse_error,
                "polynomial text at offset " + std::to_string(pos_) + ": " + why);
  }

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void skip_ws() {
    while (!done() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  SparsePolynomial parse_term(bool negative) {
    GaussianRational coeff(1);
    bool have_coeff = false;
    if (peek() == '(') {
      coeff = parse_complex_coeff();
      have_coeff = true;
    } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coeff = GaussianRational(parse_rational());
      have_coeff = true;
    }
    std::vector<Monomial::Factor> factors;
    if (have_coeff) {
      if (!consume('*')) {
        // bare constant
        if (negative) coeff = -coeff;
        return SparsePolynomial::constant(coeff);
      }
    }
    factors.push_back(parse_factor());
    while (consume('*')) factors.push_back(parse_factor());
    if (negative) coeff = -coeff;
    return SparsePolynomial::term(Monomial::from_factors(std::move(factors)), coeff);
  }

  Monomial::Factor parse_factor() {
    VariableKey key = parse_variable();
    int exponent = 1;
    if (consume('^')) exponent = parse_uint();
    return {std::move(key), exponent};
  }

  VariableKey parse_variable() {
    if (!std::isalpha(static_cast<unsigned char>(peek())) && peek() != '_')
      fail("expected variable");
    std::size_t start = pos_;
    while (!done() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name(s_.substr(start, pos_ - start));
    if ((name == "x" || name == "g") && peek() == '[') {
      ++pos_;
      std::size_t close = s_.find(']', pos_);
      if (close == std::string_view::npos) fail("unterminated '['");
      std::string inner(s_.substr(pos_, close - pos_));
      pos_ = close + 1;
      return name == "x" ? VariableKey::weight(std::move(inner))
                         : VariableKey::edge(std::move(inner));
    }
    return VariableKey::symbol(std::move(name));
  }

  Rational parse_rational() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (!done() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (consume('/')) {
      while (!done() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ == start) fail("expected number");
    return rational_from_string(s_.substr(start, pos_ - start));
  }

  GaussianRational parse_complex_coeff() {
    if (!consume('(')) fail("expected '('");
    Rational re = parse_rational();
    char sign = peek();
    if (sign != '+' && sign != '-') fail("expected sign in complex coefficient");
    ++pos_;
    Rational im = parse_rational();
    if (!consume('i')) fail("expected 'i'");
    if (!consume(')')) fail("expected ')'");
    if (sign == '-') im = -im;
    return {re, im};
  }

  int parse_uint() {
    std::size_t start = pos_;
    while (!done() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected exponent");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SparsePolynomial parse_polynomial(std::string_view text) {
  if (text == "0") return SparsePolynomial::zero();
  return detail::PolynomialParser(text).parse();
}

}  // namespace vpoly
