#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vpoly/errors.hpp"
#include "vpoly/exact.hpp"

namespace vpoly {

/// The three supported torsion-free commutative semigroups for vertex
/// weights: exact integers, fixed-length integer vectors, and fixed-length
/// vectors of Gaussian rationals. Contraction adds weights componentwise;
/// weights also serve as the indices of the x variables, so equality and
/// the textual key must both be exact.
enum class WeightKind : std::uint8_t {
  integer,
  integer_vector,
  gaussian_rational_vector,
};

inline const char* weight_kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::integer: return "Integer";
    case WeightKind::integer_vector: return "IntegerVector";
    case WeightKind::gaussian_rational_vector: return "GaussianRationalVector";
  }
  return "?";
}

class SemigroupWeight {
 public:
  SemigroupWeight() : kind_(WeightKind::integer), ints_{BigInt(0)} {}

  static SemigroupWeight integer(BigInt v) {
    SemigroupWeight w;
    w.kind_ = WeightKind::integer;
    w.ints_ = {std::move(v)};
    return w;
  }

  static SemigroupWeight integer_vector(std::vector<BigInt> v) {
    SemigroupWeight w;
    w.kind_ = WeightKind::integer_vector;
    w.ints_ = std::move(v);
    return w;
  }

  static SemigroupWeight gaussian_vector(std::vector<GaussianRational> v) {
    SemigroupWeight w;
    w.kind_ = WeightKind::gaussian_rational_vector;
    w.gauss_ = std::move(v);
    return w;
  }

  /// Scalar z as a length-1 Gaussian rational vector.
  static SemigroupWeight scalar(GaussianRational z) {
    return gaussian_vector({std::move(z)});
  }

  WeightKind kind() const { return kind_; }

  std::size_t dimension() const {
    return kind_ == WeightKind::gaussian_rational_vector ? gauss_.size() : ints_.size();
  }

  const BigInt& as_integer() const {
    if (kind_ != WeightKind::integer)
      throw_error(errc::kind_mismatch, "weight is not an Integer");
    return ints_[0];
  }

  const std::vector<BigInt>& int_entries() const { return ints_; }
  const std::vector<GaussianRational>& gauss_entries() const { return gauss_; }

  bool is_zero() const {
    for (const auto& v : ints_)
      if (v != 0) return false;
    for (const auto& g : gauss_)
      if (!g.is_zero()) return false;
    return true;
  }

  bool is_positive_integer() const {
    return kind_ == WeightKind::integer && ints_[0] > 0;
  }

  friend bool operator==(const SemigroupWeight& a, const SemigroupWeight& b) {
    return a.kind_ == b.kind_ && a.ints_ == b.ints_ && a.gauss_ == b.gauss_;
  }
  friend bool operator!=(const SemigroupWeight& a, const SemigroupWeight& b) {
    return !(a == b);
  }

 private:
  WeightKind kind_;
  std::vector<BigInt> ints_;           // integer (size 1) / integer_vector
  std::vector<GaussianRational> gauss_;  // gaussian_rational_vector
};

/// Componentwise exact sum. Both operands must share kind and dimension.
inline SemigroupWeight add(const SemigroupWeight& a, const SemigroupWeight& b) {
  if (a.kind() != b.kind())
    throw_error(errc::kind_mismatch,
                std::string("cannot add ") + weight_kind_name(a.kind()) + " and " +
                    weight_kind_name(b.kind()));
  if (a.dimension() != b.dimension())
    throw_error(errc::kind_mismatch, "cannot add weights of different dimension");
  if (a.kind() == WeightKind::gaussian_rational_vector) {
    std::vector<GaussianRational> sum;
    sum.reserve(a.dimension());
    for (std::size_t i = 0; i < a.dimension(); ++i)
      sum.push_back(a.gauss_entries()[i] + b.gauss_entries()[i]);
    return SemigroupWeight::gaussian_vector(std::move(sum));
  }
  std::vector<BigInt> sum;
  sum.reserve(a.dimension());
  for (std::size_t i = 0; i < a.dimension(); ++i)
    sum.push_back(a.int_entries()[i] + b.int_entries()[i]);
  return a.kind() == WeightKind::integer ? SemigroupWeight::integer(std::move(sum[0]))
                                         : SemigroupWeight::integer_vector(std::move(sum));
}

/// Canonical textual encoding; doubles as the x-variable index.
///   Integer 3              -> "Z:3"
///   IntegerVector (1,2)    -> "ZV:1,2"
///   GaussianRationalVector -> "QV:1/2+0/1i,..."  (lowest terms, positive
///                             denominators, imaginary sign always written)
/// Injective: equal keys iff equal weights.
inline std::string canonical_key(const SemigroupWeight& w) {
  std::string s;
  switch (w.kind()) {
    case WeightKind::integer:
      return "Z:" + w.as_integer().str();
    case WeightKind::integer_vector:
      s = "ZV:";
      for (std::size_t i = 0; i < w.int_entries().size(); ++i) {
        if (i) s += ",";
        s += w.int_entries()[i].str();
      }
      return s;
    case WeightKind::gaussian_rational_vector:
      s = "QV:";
      for (std::size_t i = 0; i < w.gauss_entries().size(); ++i) {
        if (i) s += ",";
        s += gaussian_to_key_string(w.gauss_entries()[i]);
      }
      return s;
  }
  throw_error(errc::internal_check, "unreachable weight kind");
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace detail

/// Inverse of canonical_key.
inline SemigroupWeight parse_weight(std::string_view text) {
  auto fail = [&]() -> SemigroupWeight {
    throw_error(errc::parse_error, "bad weight encoding '" + std::string(text) + "'");
  };
  if (text.rfind("Z:", 0) == 0) {
    BigInt v;
    if (!detail::parse_bigint(text.substr(2), v)) fail();
    return SemigroupWeight::integer(v);
  }
  if (text.rfind("ZV:", 0) == 0) {
    std::vector<BigInt> vs;
    for (auto part : detail::split_commas(text.substr(3))) {
      BigInt v;
      if (!detail::parse_bigint(part, v)) fail();
      vs.push_back(v);
    }
    if (vs.empty()) fail();
    return SemigroupWeight::integer_vector(std::move(vs));
  }
  if (text.rfind("QV:", 0) == 0) {
    std::vector<GaussianRational> vs;
    for (auto part : detail::split_commas(text.substr(3)))
      vs.push_back(gaussian_from_key_string(part));
    if (vs.empty()) fail();
    return SemigroupWeight::gaussian_vector(std::move(vs));
  }
  return fail();
}

}  // namespace vpoly
