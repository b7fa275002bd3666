#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include "vpoly/errors.hpp"

namespace vpoly {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// num/den reduced to lowest terms with positive denominator.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw_error(errc::division_by_zero, "rational with zero denominator");
  return Rational(num) / Rational(den);
}

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

/// "p" when the denominator is 1, "p/q" otherwise.
inline std::string rational_to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += "/";
    s += denominator(r).str();
  }
  return s;
}

/// Always "p/q", the form used inside canonical weight keys.
inline std::string rational_to_fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double rational_to_double(const Rational& r) {
  return static_cast<double>(r);
}

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double d) {
  if (!std::isfinite(d)) throw_error(errc::parse_error, "non-finite number");
  int exp = 0;
  double mant = std::frexp(d, &exp);
  // 53 bits of mantissa
  long long scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(scaled);
  if (exp >= 0) {
    r *= Rational(BigInt(1) << exp);
  } else {
    r /= Rational(BigInt(1) << -exp);
  }
  return r;
}

namespace detail {

inline bool parse_bigint(std::string_view s, BigInt& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = (s[0] == '-');
    i = 1;
  }
  if (i == s.size()) return false;
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? BigInt(-v) : v;
  return true;
}

}  // namespace detail

/// Accepts "p", "p/q", and plain decimals like "-1.25" (parsed exactly,
/// so "0.1" means 1/10). No exponent notation.
inline Rational rational_from_string(std::string_view s) {
  auto fail = [&]() -> Rational {
    throw_error(errc::parse_error, "bad rational literal '" + std::string(s) + "'");
  };
  if (s.empty()) fail();
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    BigInt num, den;
    if (!detail::parse_bigint(s.substr(0, slash), num) ||
        !detail::parse_bigint(s.substr(slash + 1), den) || den == 0)
      fail();
    return make_rational(num, den);
  }
  auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    BigInt v;
    if (!detail::parse_bigint(s, v)) fail();
    return Rational(v);
  }
  std::string_view head = s.substr(0, dot);
  std::string_view frac = s.substr(dot + 1);
  if (frac.empty()) fail();
  bool neg = !head.empty() && head[0] == '-';
  BigInt int_part = 0;
  if (!head.empty() && head != "-" && head != "+") {
    if (!detail::parse_bigint(head, int_part)) fail();
  }
  BigInt frac_num = 0, frac_den = 1;
  for (char c : frac) {
    if (c < '0' || c > '9') fail();
    frac_num = frac_num * 10 + (c - '0');
    frac_den *= 10;
  }
  Rational r(int_part < 0 ? -int_part : int_part);
  r += make_rational(frac_num, frac_den);
  return neg ? Rational(-r) : r;
}

inline Rational rational_pow(const Rational& base, unsigned e) {
  Rational acc(1), b = base;
  while (e) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1u;
  }
  return acc;
}

/// Complex number with exact rational real and imaginary parts.
/// These are the polynomial coefficients and the exact field entries.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() : re(0), im(0) {}
  GaussianRational(Rational r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(long long r) : re(r), im(0) {}            // NOLINT(google-explicit-constructor)
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational norm = b.re * b.re + b.im * b.im;
    if (norm == 0) throw_error(errc::division_by_zero, "division by zero Gaussian rational");
    return {(a.re * b.re + a.im * b.im) / norm, (a.im * b.re - a.re * b.im) / norm};
  }
  GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
  GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
  GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
  // Lexicographic; used only for deterministic ordering, not magnitude.
  friend bool operator<(const GaussianRational& a, const GaussianRational& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }

  std::complex<double> to_complex() const {
    return {rational_to_double(re), rational_to_double(im)};
  }
};

inline GaussianRational gaussian_pow(const GaussianRational& base, unsigned e) {
  GaussianRational acc(Rational(1)), b = base;
  while (e) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1u;
  }
  return acc;
}

/// Human form: real values print as "p" or "p/q"; properly complex values
/// as "(re+imi)" / "(re-imi)".
inline std::string gaussian_to_string(const GaussianRational& g) {
  if (g.is_real()) return rational_to_string(g.re);
  Rational abs_im = g.im < 0 ? Rational(-g.im) : g.im;
  return "(" + rational_to_string(g.re) + (g.im < 0 ? "-" : "+") +
         rational_to_string(abs_im) + "i)";
}

/// Canonical key form used in weight encodings: "re/den+im/deni" with the
/// denominator always written and the imaginary sign always present.
inline std::string gaussian_to_key_string(const GaussianRational& g) {
  Rational abs_im = g.im < 0 ? Rational(-g.im) : g.im;
  return rational_to_fraction_string(g.re) + (g.im < 0 ? "-" : "+") +
         rational_to_fraction_string(abs_im) + "i";
}

/// Inverse of gaussian_to_key_string (also accepts bare rationals).
inline GaussianRational gaussian_from_key_string(std::string_view s) {
  if (s.empty()) throw_error(errc::parse_error, "empty complex literal");
  if (s.back() != 'i') return GaussianRational(rational_from_string(s));
  s.remove_suffix(1);
  // locate the sign separating re from im, skipping a leading sign
  std::size_t split = std::string_view::npos;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] == '+' || s[i] == '-') split = i;  // last sign wins: "1/2+3/4"
  }
  if (split == std::string_view::npos)
    throw_error(errc::parse_error, "bad complex literal '" + std::string(s) + "i'");
  Rational re = rational_from_string(s.substr(0, split));
  Rational im = rational_from_string(s.substr(split + 1));
  if (s[split] == '-') im = -im;
  return {re, im};
}

inline std::complex<double> complex_exp(const std::complex<double>& z) { return std::exp(z); }

/// Relative closeness with an absolute floor for values near zero.
inline bool approx_equal(const std::complex<double>& a, const std::complex<double>& b,
                         double rel_tol, double abs_floor = 1e-300) {
  double scale = std::max({std::abs(a), std::abs(b), abs_floor});
  return std::abs(a - b) <= rel_tol * scale;
}

inline double relative_deviation(const std::complex<double>& a, const std::complex<double>& b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace vpoly
