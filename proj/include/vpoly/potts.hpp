#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vpoly/engine.hpp"
#include "vpoly/errors.hpp"
#include "vpoly/exact.hpp"
#include "vpoly/multigraph.hpp"
#include "vpoly/polynomial.hpp"
#include "vpoly/weights.hpp"

namespace vpoly {

using Complex = std::complex<double>;

/// The Hamiltonian families, from the fully general external field down to
/// the Ising model with local fields:
///   general        h = -sum J_e delta(s_u, s_v) - sum_i sum_a M_{i,a} delta(a, s_i)
///   zero           h = -sum J_e delta(s_u, s_v)
///   integer_scaled M_i = k_i * B, constant J
///   constant       M_i = B, constant J
///   preferred      h = -sum J_e delta(s_u, s_v) - sum_i z_i delta(1, s_i)
///   r_field        M_i zero beyond coordinate r
///   ising          h = -sum J_e t_u t_v - sum_i z_i t_i,  t in {-1,+1}, q = 2
enum class FieldFamily {
  general,
  zero,
  integer_scaled,
  constant,
  preferred,
  r_field,
  ising,
};

inline const char* field_family_name(FieldFamily f) {
  switch (f) {
    case FieldFamily::general: return "general";
    case FieldFamily::zero: return "zero";
    case FieldFamily::integer_scaled: return "integer-scaled";
    case FieldFamily::constant: return "constant";
    case FieldFamily::preferred: return "preferred";
    case FieldFamily::r_field: return "r-field";
    case FieldFamily::ising: return "ising";
  }
  return "?";
}

/// Interaction energies J_e: one constant or one value per edge.
class Interactions {
 public:
  Interactions() : constant_(0.0), is_constant_(true) {}

  static Interactions constant(double j) {
    Interactions v;
    v.is_constant_ = true;
    v.constant_ = j;
    return v;
  }

  static Interactions per_edge(std::map<std::string, double> js) {
    Interactions v;
    v.is_constant_ = false;
    v.per_edge_ = std::move(js);
    return v;
  }

  bool is_constant() const { return is_constant_; }

  double constant_value() const {
    if (!is_constant_) throw_error(errc::non_constant_j, "interactions are edge-dependent");
    return constant_;
  }

  double at(const std::string& edge_id) const {
    if (is_constant_) return constant_;
    auto it = per_edge_.find(edge_id);
    if (it == per_edge_.end())
      throw_error(errc::spec_mismatch, "no interaction energy for edge '" + edge_id + "'");
    return it->second;
  }

  double sum_over(const WeightedMultigraph& g) const {
    double s = 0.0;
    for (const auto& [id, e] : g.edges()) s += at(id);
    return s;
  }

  Interactions scaled(double factor) const {
    Interactions v = *this;
    v.constant_ *= factor;
    for (auto& [id, j] : v.per_edge_) j *= factor;
    return v;
  }

  const std::map<std::string, double>& per_edge_values() const { return per_edge_; }

 private:
  double constant_;
  bool is_constant_;
  std::map<std::string, double> per_edge_;
};

/// A spin assignment. Spins run over 1..q, or over {-1,+1} for the Ising
/// family.
struct SpinState {
  std::map<std::string, int> spin;

  int at(const std::string& vertex_id) const {
    auto it = spin.find(vertex_id);
    if (it == spin.end())
      throw_error(errc::spec_mismatch, "state does not assign vertex '" + vertex_id + "'");
    return it->second;
  }
};

struct HamiltonianSpec {
  FieldFamily family = FieldFamily::zero;
  int q = 2;
  double beta = 1.0;
  Interactions j;

  // exact field data, interpreted per family
  std::map<std::string, std::vector<GaussianRational>> vector_fields;  // general, r_field
  std::vector<GaussianRational> base_field;                            // integer_scaled, constant
  std::map<std::string, BigInt> multipliers;                           // integer_scaled
  std::map<std::string, GaussianRational> scalar_fields;               // preferred, ising
  int r = 0;                                                           // r_field

  // numeric-only general fields; usable on numeric paths, rejected by
  // symbolic ones with InexactField
  std::map<std::string, std::vector<Complex>> numeric_fields;

  bool numeric_only() const { return !numeric_fields.empty(); }

  static HamiltonianSpec general(int q, double beta, Interactions j,
                                 std::map<std::string, std::vector<GaussianRational>> fields) {
    HamiltonianSpec s;
    s.family = FieldFamily::general;
    s.q = q;
    s.beta = beta;
    s.j = std::move(j);
    s.vector_fields = std::move(fields);
    return s;
  }

  static HamiltonianSpec general_numeric(int q, double beta, Interactions j,
                                         std::map<std::string, std::vector<Complex>> fields) {
    HamiltonianSpec s;
    s.family = FieldFamily::general;
    s.q = q;
    s.beta = beta;
    s.j = std::move(j);
    s.numeric_fields = std::move(fields);
    return s;
  }

  static HamiltonianSpec zero_field(int q, double beta, Interactions j) {
    HamiltonianSpec s;
    s.family = FieldFamily::zero;
    s.q = q;
    s.beta = beta;
    s.j = std::move(j);
    return s;
  }

  static HamiltonianSpec integer_scaled(int q, double beta, double j_const,
                                        std::vector<GaussianRational> base,
                                        std::map<std::string, BigInt> ks) {
    HamiltonianSpec s;
    s.family = FieldFamily::integer_scaled;
    s.q = q;
    s.beta = beta;
    s.j = Interactions::constant(j_const);
    s.base_field = std::move(base);
    s.multipliers = std::move(ks);
    return s;
  }

  static HamiltonianSpec constant_field(int q, double beta, double j_const,
                                        std::vector<GaussianRational> base) {
    HamiltonianSpec s;
    s.family = FieldFamily::constant;
    s.q = q;
    s.beta = beta;
    s.j = Interactions::constant(j_const);
    s.base_field = std::move(base);
    return s;
  }

  static HamiltonianSpec preferred_spin(int q, double beta, Interactions j,
                                        std::map<std::string, GaussianRational> zs) {
    HamiltonianSpec s;
    s.family = FieldFamily::preferred;
    s.q = q;
    s.beta = beta;
    s.j = std::move(j);
    s.scalar_fields = std::move(zs);
    return s;
  }

  static HamiltonianSpec r_field_sokal(int q, double beta, Interactions j, int r,
                                       std::map<std::string, std::vector<GaussianRational>> fields) {
    HamiltonianSpec s;
    s.family = FieldFamily::r_field;
    s.q = q;
    s.beta = beta;
    s.j = std::move(j);
    s.r = r;
    s.vector_fields = std::move(fields);
    return s;
  }

  static HamiltonianSpec ising(double beta, Interactions j,
                               std::map<std::string, GaussianRational> zs) {
    HamiltonianSpec s;
    s.family = FieldFamily::ising;
    s.q = 2;
    s.beta = beta;
    s.j = std::move(j);
    s.scalar_fields = std::move(zs);
    return s;
  }
};

struct PottsOptions {
  std::uint64_t max_states = std::uint64_t(1) << 22;
  EngineOptions engine;
  double tolerance = 1e-9;
};

namespace detail {

inline GaussianRational scale_by_bigint(const GaussianRational& g, const BigInt& k) {
  Rational f(k);
  return {g.re * f, g.im * f};
}

inline const std::vector<GaussianRational>& require_vector_field(const HamiltonianSpec& spec,
                                                                 const std::string& vertex) {
  auto it = spec.vector_fields.find(vertex);
  if (it == spec.vector_fields.end())
    throw_error(errc::spec_mismatch, "no field vector for vertex '" + vertex + "'");
  return it->second;
}

inline const GaussianRational& require_scalar_field(const HamiltonianSpec& spec,
                                                    const std::string& vertex) {
  auto it = spec.scalar_fields.find(vertex);
  if (it == spec.scalar_fields.end())
    throw_error(errc::spec_mismatch, "no scalar field for vertex '" + vertex + "'");
  return it->second;
}

}  // namespace detail

/// The exact magnetic field vector of one vertex under the family's
/// interpretation (ising yields its general-embedding vector (2z, 4z)).
inline std::vector<GaussianRational> field_vector(const HamiltonianSpec& spec,
                                                  const std::string& vertex) {
  const std::size_t q = static_cast<std::size_t>(spec.q);
  switch (spec.family) {
    case FieldFamily::general:
    case FieldFamily::r_field:
      if (spec.numeric_only())
        throw_error(errc::inexact_field,
                    "field entries are not exact; symbolic mode is unavailable");
      return detail::require_vector_field(spec, vertex);
    case FieldFamily::zero:
      return std::vector<GaussianRational>(q, GaussianRational(0));
    case FieldFamily::integer_scaled: {
      auto it = spec.multipliers.find(vertex);
      if (it == spec.multipliers.end())
        throw_error(errc::spec_mismatch, "no multiplier for vertex '" + vertex + "'");
      std::vector<GaussianRational> m;
      m.reserve(q);
      for (const auto& b : spec.base_field) m.push_back(detail::scale_by_bigint(b, it->second));
      return m;
    }
    case FieldFamily::constant:
      return spec.base_field;
    case FieldFamily::preferred: {
      std::vector<GaussianRational> m(q, GaussianRational(0));
      m[0] = detail::require_scalar_field(spec, vertex);
      return m;
    }
    case FieldFamily::ising: {
      const GaussianRational& z = detail::require_scalar_field(spec, vertex);
      return {detail::scale_by_bigint(z, 2), detail::scale_by_bigint(z, 4)};
    }
  }
  throw_error(errc::internal_check, "unreachable family");
}

struct GeneralEmbedding {
  HamiltonianSpec spec;  // general family, exact vectors (unless numeric-only input)
  Complex prefactor{1.0, 0.0};
};

/// Validates the spec against the graph and rewrites it into the general
/// family. Everything except ising embeds verbatim; ising doubles the
/// interactions, maps z to (2z, 4z) and contributes the prefactor
/// e^{-beta (sum J_e + 3 sum z_i)}.
inline GeneralEmbedding embed_general(const HamiltonianSpec& spec, const WeightedMultigraph& g) {
  if (spec.q < 1) throw_error(errc::spec_mismatch, "q must be at least 1");
  if (!(spec.beta > 0.0)) throw_error(errc::spec_mismatch, "beta must be positive");
  if (spec.family == FieldFamily::ising && spec.q != 2)
    throw_error(errc::spec_mismatch, "the ising family requires q = 2");
  if (spec.family == FieldFamily::r_field) {
    if (spec.r < 0 || spec.r > spec.q)
      throw_error(errc::spec_mismatch, "r must lie in [0, q]");
    for (const auto& [id, w] : g.vertices()) {
      const auto& m = detail::require_vector_field(spec, id);
      for (std::size_t a = static_cast<std::size_t>(spec.r); a < m.size(); ++a)
        if (!m[a].is_zero())
          throw_error(errc::truncation_violation,
                      "field of vertex '" + id + "' is nonzero beyond coordinate r");
    }
  }
  if (spec.family == FieldFamily::integer_scaled || spec.family == FieldFamily::constant) {
    (void)spec.j.constant_value();  // NonConstantJ when edge-dependent
    if (spec.base_field.size() != static_cast<std::size_t>(spec.q))
      throw_error(errc::spec_mismatch, "base field vector must have length q");
  }
  if (spec.family == FieldFamily::integer_scaled) {
    for (const auto& [id, w] : g.vertices()) {
      auto it = spec.multipliers.find(id);
      if (it == spec.multipliers.end())
        throw_error(errc::spec_mismatch, "no multiplier for vertex '" + id + "'");
      if (it->second <= 0)
        throw_error(errc::non_positive_weight,
                    "multiplier of vertex '" + id + "' must be a positive integer");
    }
  }

  GeneralEmbedding out;
  out.spec.family = FieldFamily::general;
  out.spec.q = spec.q;
  out.spec.beta = spec.beta;
  out.spec.j = spec.family == FieldFamily::ising ? spec.j.scaled(2.0) : spec.j;

  if (spec.numeric_only()) {
    if (spec.family != FieldFamily::general)
      throw_error(errc::spec_mismatch, "numeric fields are only supported on the general family");
    for (const auto& [id, w] : g.vertices()) {
      auto it = spec.numeric_fields.find(id);
      if (it == spec.numeric_fields.end())
        throw_error(errc::spec_mismatch, "no field vector for vertex '" + id + "'");
      if (it->second.size() != static_cast<std::size_t>(spec.q))
        throw_error(errc::spec_mismatch, "field of vertex '" + id + "' must have length q");
      out.spec.numeric_fields.emplace(id, it->second);
    }
  } else {
    for (const auto& [id, w] : g.vertices()) {
      std::vector<GaussianRational> m = field_vector(spec, id);
      if (m.size() != static_cast<std::size_t>(spec.q))
        throw_error(errc::spec_mismatch, "field of vertex '" + id + "' must have length q");
      out.spec.vector_fields.emplace(id, std::move(m));
    }
  }

  if (spec.family == FieldFamily::ising) {
    GaussianRational z_sum(0);
    for (const auto& [id, w] : g.vertices()) z_sum += detail::require_scalar_field(spec, id);
    Complex exponent = -spec.beta * (Complex(spec.j.sum_over(g)) + 3.0 * z_sum.to_complex());
    out.prefactor = std::exp(exponent);
  }

  // |e^x| overflows double near x = 710; reject rather than return inf
  double max_scale = 0.0;
  for (const auto& [id, m] : out.spec.vector_fields)
    for (const auto& entry : m)
      max_scale = std::max(max_scale, std::abs(rational_to_double(entry.re)));
  for (const auto& [id, m] : out.spec.numeric_fields)
    for (const auto& entry : m) max_scale = std::max(max_scale, std::abs(entry.real()));
  for (const auto& [id, e] : g.edges())
    max_scale = std::max(max_scale, std::abs(out.spec.j.at(id)));
  if (spec.beta * max_scale > 700.0)
    throw_error(errc::range_warning,
                "|beta * field| exceeds 700; the double-precision exponential would overflow");

  return out;
}

/// Numeric field vector of one vertex in a general-family spec.
inline std::vector<Complex> numeric_field_vector(const HamiltonianSpec& general,
                                                 const std::string& vertex) {
  if (general.numeric_only()) {
    auto it = general.numeric_fields.find(vertex);
    if (it == general.numeric_fields.end())
      throw_error(errc::spec_mismatch, "no field vector for vertex '" + vertex + "'");
    return it->second;
  }
  const auto& m = detail::require_vector_field(general, vertex);
  std::vector<Complex> out;
  out.reserve(m.size());
  for (const auto& e : m) out.push_back(e.to_complex());
  return out;
}

// ---------------------------------------------------------------------------
// Hamiltonians and the Boltzmann distribution
// ---------------------------------------------------------------------------

/// Energy of one spin state under the family's own defining Hamiltonian.
inline Complex hamiltonian_value(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                 const SpinState& state) {
  if (spec.family == FieldFamily::ising) {
    Complex h = 0.0;
    for (const auto& [id, e] : g.edges()) {
      int tu = state.at(e.u), tv = state.at(e.v);
      if ((tu != -1 && tu != 1) || (tv != -1 && tv != 1))
        throw_error(errc::spec_mismatch, "ising spins must be -1 or +1");
      h -= spec.j.at(id) * static_cast<double>(tu * tv);
    }
    for (const auto& [id, w] : g.vertices()) {
      int t = state.at(id);
      if (t != -1 && t != 1) throw_error(errc::spec_mismatch, "ising spins must be -1 or +1");
      h -= detail::require_scalar_field(spec, id).to_complex() * static_cast<double>(t);
    }
    return h;
  }

  Complex h = 0.0;
  for (const auto& [id, e] : g.edges())
    if (state.at(e.u) == state.at(e.v)) h -= spec.j.at(id);
  if (spec.family == FieldFamily::zero) {
    for (const auto& [id, w] : g.vertices()) {
      int s = state.at(id);
      if (s < 1 || s > spec.q) throw_error(errc::spec_mismatch, "spin out of range 1..q");
    }
    return h;
  }
  for (const auto& [id, w] : g.vertices()) {
    int s = state.at(id);
    if (s < 1 || s > spec.q) throw_error(errc::spec_mismatch, "spin out of range 1..q");
    if (spec.family == FieldFamily::general && spec.numeric_only()) {
      h -= numeric_field_vector(spec, id)[static_cast<std::size_t>(s - 1)];
    } else {
      h -= field_vector(spec, id)[static_cast<std::size_t>(s - 1)].to_complex();
    }
  }
  return h;
}

namespace detail {

struct StateEnumeration {
  std::vector<std::string> vertex_ids;
  int spins_per_vertex;         // q, or 2 for ising
  std::uint64_t total_states;   // spins^|V|
};

inline StateEnumeration make_enumeration(const HamiltonianSpec& spec,
                                         const WeightedMultigraph& g,
                                         const PottsOptions& opts) {
  StateEnumeration en;
  for (const auto& [id, w] : g.vertices()) en.vertex_ids.push_back(id);
  en.spins_per_vertex = spec.family == FieldFamily::ising ? 2 : spec.q;
  en.total_states = 1;
  const auto spins = static_cast<std::uint64_t>(en.spins_per_vertex);
  for (std::size_t i = 0; i < en.vertex_ids.size(); ++i) {
    if (en.total_states > opts.max_states / spins)
      throw_error(errc::too_large,
                  "state space exceeds the cap of " + std::to_string(opts.max_states) +
                      " states (raise --max-states to override)");
    en.total_states *= spins;
  }
  return en;
}

}  // namespace detail

/// All spin states of the graph under this spec, in a fixed order (the
/// mixed-radix odometer over id-sorted vertices). Intended for small
/// instances; honors the state cap.
inline std::vector<SpinState> enumerate_states(const HamiltonianSpec& spec,
                                               const WeightedMultigraph& g,
                                               const PottsOptions& opts = {}) {
  const bool ising = spec.family == FieldFamily::ising;
  detail::StateEnumeration en = detail::make_enumeration(spec, g, opts);
  std::vector<SpinState> states;
  states.reserve(en.total_states);
  std::vector<int> digit(en.vertex_ids.size(), 0);
  for (std::uint64_t s = 0; s < en.total_states; ++s) {
    SpinState st;
    for (std::size_t i = 0; i < en.vertex_ids.size(); ++i)
      st.spin[en.vertex_ids[i]] = ising ? (digit[i] == 0 ? -1 : +1) : digit[i] + 1;
    states.push_back(std::move(st));
    for (std::size_t i = 0; i < digit.size(); ++i) {
      if (++digit[i] < en.spins_per_vertex) break;
      digit[i] = 0;
    }
  }
  return states;
}

/// Z(G) by direct summation over all q^{|V|} spin states (2^{|V|} tau
/// states for the ising family). The module's ground-truth oracle.
inline Complex partition_bruteforce(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                    const PottsOptions& opts = {}) {
  (void)embed_general(spec, g);  // spec/graph consistency and range checks
  const bool ising = spec.family == FieldFamily::ising;
  detail::StateEnumeration en = detail::make_enumeration(spec, g, opts);
  const std::size_t n = en.vertex_ids.size();

  // Boltzmann weight factorization: e^{-beta h} splits into per-edge and
  // per-vertex factors, avoiding one exp() per state.
  std::map<std::string, std::size_t> vertex_pos;
  for (std::size_t i = 0; i < n; ++i) vertex_pos.emplace(en.vertex_ids[i], i);

  struct EdgeFacts {
    std::size_t u, v;
    Complex plus, minus;  // e^{+beta J_e} (spins agree) and e^{-beta J_e} (ising only)
  };
  std::vector<EdgeFacts> edges;
  for (const auto& [id, e] : g.edges()) {
    EdgeFacts f;
    f.u = vertex_pos.at(e.u);
    f.v = vertex_pos.at(e.v);
    double j = spec.j.at(id);
    f.plus = std::exp(Complex(spec.beta * j));
    f.minus = std::exp(Complex(-spec.beta * j));
    edges.push_back(f);
  }

  // vertex_factor[i][digit] = e^{beta * (field term)}
  std::vector<std::vector<Complex>> vertex_factor(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ising) {
      Complex z = detail::require_scalar_field(spec, en.vertex_ids[i]).to_complex();
      vertex_factor[i] = {std::exp(-spec.beta * z), std::exp(spec.beta * z)};  // tau=-1, +1
    } else if (spec.family == FieldFamily::zero) {
      vertex_factor[i].assign(static_cast<std::size_t>(spec.q), Complex(1.0));
    } else {
      std::vector<Complex> m;
      if (spec.family == FieldFamily::general && spec.numeric_only())
        m = numeric_field_vector(spec, en.vertex_ids[i]);
      else {
        for (const auto& e : field_vector(spec, en.vertex_ids[i])) m.push_back(e.to_complex());
      }
      for (const auto& entry : m) vertex_factor[i].push_back(std::exp(spec.beta * entry));
    }
  }

  std::vector<int> digit(n, 0);
  Complex total = 0.0;
  while (true) {
    Complex w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= vertex_factor[i][digit[i]];
    for (const auto& e : edges) {
      if (ising) {
        w *= (digit[e.u] == digit[e.v]) ? e.plus : e.minus;
      } else if (digit[e.u] == digit[e.v]) {
        w *= e.plus;
      }
    }
    total += w;
    // odometer increment
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++digit[i] < en.spins_per_vertex) break;
      digit[i] = 0;
    }
    if (i == n) break;
  }
  return total;
}

/// Boltzmann probability of one state, e^{-beta h} / Z, by brute force.
/// Defined for real-valued specs.
inline double boltzmann_probability(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                    const SpinState& state, const PottsOptions& opts = {}) {
  Complex h = hamiltonian_value(spec, g, state);
  if (std::abs(h.imag()) > 1e-12)
    throw_error(errc::spec_mismatch, "Boltzmann probabilities need a real-valued Hamiltonian");
  Complex z = partition_bruteforce(spec, g, opts);
  if (std::abs(z) == 0.0) throw_error(errc::zero_partition, "partition function vanishes");
  return std::exp(-spec.beta * h.real()) / z.real();
}

// ---------------------------------------------------------------------------
// Z through the V-polynomial machinery
// ---------------------------------------------------------------------------

/// X_M = sum_{alpha=1}^q e^{beta M_alpha} for an exact field vector, the
/// x-variable substitution of the Z = V evaluation.
inline Complex x_value(const std::vector<GaussianRational>& m, double beta) {
  Complex x = 0.0;
  for (const auto& entry : m) x += std::exp(beta * entry.to_complex());
  return x;
}

inline Complex x_value_numeric(const std::vector<Complex>& m, double beta) {
  Complex x = 0.0;
  for (const auto& entry : m) x += std::exp(beta * entry);
  return x;
}

/// The weighted multigraph whose V-polynomial evaluates to Z: vertex
/// weights are the (embedded) field vectors, edges stay symbolic.
inline WeightedMultigraph field_weighted_graph(const HamiltonianSpec& general,
                                               const WeightedMultigraph& g) {
  if (general.numeric_only())
    throw_error(errc::inexact_field, "field entries are not exact; symbolic mode is unavailable");
  WeightedMultigraph out;
  for (const auto& [id, w] : g.vertices())
    out.add_vertex(id, SemigroupWeight::gaussian_vector(
                           detail::require_vector_field(general, id)));
  for (const auto& [id, e] : g.edges()) out.add_edge(id, e.u, e.v, EdgeWeight::symbolic());
  return out;
}

namespace detail {

inline Complex z_recurse(const HamiltonianSpec& general, const WeightedMultigraph& gz,
                         std::map<std::string, Complex>* memo) {
  std::string key;
  if (memo) {
    key = gz.canonical_encoding();
    auto it = memo->find(key);
    if (it != memo->end()) return it->second;
  }

  Complex result;
  std::vector<std::string> loops;
  for (const auto& [id, e] : gz.edges())
    if (e.is_loop()) loops.push_back(id);
  if (!loops.empty()) {
    // Z(G) = e^{beta J_e} Z(G - e) for loops
    WeightedMultigraph rest = gz;
    Complex factor = 1.0;
    for (const auto& id : loops) {
      factor *= std::exp(Complex(general.beta * general.j.at(id)));
      rest = rest.delete_edge(id);
    }
    result = factor * z_recurse(general, rest, memo);
  } else if (gz.edge_count() == 0) {
    // Z(E_n) = prod X_{M_i}
    result = 1.0;
    for (const auto& [id, w] : gz.vertices())
      result *= x_value(w.gauss_entries(), general.beta);
  } else {
    // Z(G) = Z(G-e) + (e^{beta J_e} - 1) Z(G/e)
    const std::string pivot = pick_pivot(gz, EdgeOrder::lowest_id_first);
    Complex gamma = std::exp(Complex(general.beta * general.j.at(pivot))) - 1.0;
    result = z_recurse(general, gz.delete_edge(pivot), memo) +
             gamma * z_recurse(general, gz.contract_edge(pivot), memo);
  }

  if (memo) memo->emplace(std::move(key), result);
  return result;
}

}  // namespace detail

/// Z(G) by the deletion-contraction recursion on the field-weighted graph:
/// contraction adds the field vectors, loops contribute e^{beta J}, and the
/// edgeless base case is the product of X factors.
inline Complex partition_deletion_contraction(const HamiltonianSpec& spec,
                                              const WeightedMultigraph& g,
                                              const PottsOptions& opts = {}) {
  detail::check_edge_cap(g, opts.engine);
  GeneralEmbedding em = embed_general(spec, g);
  WeightedMultigraph gz = field_weighted_graph(em.spec, g);
  std::map<std::string, Complex> memo;
  return em.prefactor *
         detail::z_recurse(em.spec, gz, opts.engine.use_memo ? &memo : nullptr);
}

struct PartitionViaV {
  Complex value{0.0, 0.0};
  SparsePolynomial v;  // the symbolic V used (empty in numeric mode)
  std::map<VariableKey, Complex> assignment;
};

/// Z(G) = V(G, omega; {X_M}, {e^{beta J_e} - 1}) with omega_i = M_i.
/// Symbolic mode collects V exactly and then substitutes; numeric mode runs
/// the same spanning-subgraph sum with X values inserted on the fly (this
/// is the path that accepts non-exact complex fields).
inline PartitionViaV partition_via_v(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                     bool symbolic = true, const PottsOptions& opts = {}) {
  GeneralEmbedding em = embed_general(spec, g);
  PartitionViaV out;

  if (symbolic) {
    WeightedMultigraph gz = field_weighted_graph(em.spec, g);
    out.v = v_state_sum(gz, opts.engine);
    for (const auto& key : out.v.variables()) {
      if (key.kind == VariableKey::Kind::weight) {
        SemigroupWeight w = parse_weight(key.name);
        out.assignment.emplace(key, x_value(w.gauss_entries(), em.spec.beta));
      } else if (key.kind == VariableKey::Kind::edge) {
        out.assignment.emplace(
            key, std::exp(Complex(em.spec.beta * em.spec.j.at(key.name))) - 1.0);
      }
    }
    out.value = em.prefactor * out.v.eval(out.assignment);
    return out;
  }

  // numeric mode: FK-style subset sum without symbolic indexing
  detail::check_edge_cap(g, opts.engine);
  const std::vector<std::string> edge_ids = g.edge_ids();
  const std::uint64_t total = std::uint64_t(1) << edge_ids.size();
  std::map<std::string, std::vector<Complex>> fields;
  for (const auto& [id, w] : g.vertices())
    fields.emplace(id, numeric_field_vector(em.spec, id));
  Complex sum = 0.0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<std::string> subset;
    Complex edge_factor = 1.0;
    for (std::size_t i = 0; i < edge_ids.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      subset.push_back(edge_ids[i]);
      edge_factor *= std::exp(Complex(em.spec.beta * em.spec.j.at(edge_ids[i]))) - 1.0;
    }
    ComponentReport rep = g.components(subset);
    Complex x_product = 1.0;
    for (const auto& comp : rep.components) {
      std::vector<Complex> m(static_cast<std::size_t>(em.spec.q), Complex(0.0));
      for (const auto& member : comp.members) {
        const auto& f = fields.at(member);
        for (std::size_t a = 0; a < m.size(); ++a) m[a] += f[a];
      }
      x_product *= x_value_numeric(m, em.spec.beta);
    }
    sum += x_product * edge_factor;
  }
  out.value = em.prefactor * sum;
  return out;
}

// ---------------------------------------------------------------------------
// Fortuin-Kasteleyn expansion
// ---------------------------------------------------------------------------

struct FKTerm {
  std::vector<std::string> subset;            // edge ids of A, sorted
  std::vector<std::string> component_weights; // canonical keys of M_{C_l}
  Complex x_product{1.0, 0.0};                // X_{M_{C_1}} ... X_{M_{C_k}}
  Complex edge_factor{1.0, 0.0};              // prod (e^{beta J_e} - 1)
  Complex value{0.0, 0.0};
};

struct FKExpansion {
  std::vector<FKTerm> terms;  // exactly 2^|E|, in subset-mask order
  Complex prefactor{1.0, 0.0};
  Complex total{0.0, 0.0};    // prefactor * sum of term values = Z
};

/// Z(G) = sum over A of X_{M_{C_1}} ... X_{M_{C_{k(A)}}} prod_{e in A}
/// (e^{beta J_e} - 1). The preferred-spin and r-field forms of X come out
/// of the same code path via their embedded vectors.
inline FKExpansion fk_expansion(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                const PottsOptions& opts = {}) {
  detail::check_edge_cap(g, opts.engine);
  GeneralEmbedding em = embed_general(spec, g);
  WeightedMultigraph gz = field_weighted_graph(em.spec, g);

  const std::vector<std::string> edge_ids = gz.edge_ids();
  const std::uint64_t total_subsets = std::uint64_t(1) << edge_ids.size();
  FKExpansion fk;
  fk.prefactor = em.prefactor;
  for (std::uint64_t mask = 0; mask < total_subsets; ++mask) {
    FKTerm term;
    for (std::size_t i = 0; i < edge_ids.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      term.subset.push_back(edge_ids[i]);
      term.edge_factor *=
          std::exp(Complex(em.spec.beta * em.spec.j.at(edge_ids[i]))) - 1.0;
    }
    ComponentReport rep = gz.components(term.subset);
    for (const auto& comp : rep.components) {
      term.component_weights.push_back(canonical_key(comp.weight_sum));
      term.x_product *= x_value(comp.weight_sum.gauss_entries(), em.spec.beta);
    }
    term.value = term.x_product * term.edge_factor;
    fk.total += term.value;
    fk.terms.push_back(std::move(term));
  }
  fk.total *= fk.prefactor;
  return fk;
}

// ---------------------------------------------------------------------------
// Specializations (the hierarchy of Section 5)
// ---------------------------------------------------------------------------

struct WReduction {
  Complex prefactor{0.0, 0.0};             // (e^{beta J} - 1)^{|V|}
  WeightedMultigraph integer_graph;        // omega_i = k_i
  SparsePolynomial w;                      // W(G; x, y), y symbolic
  Complex y_value{0.0, 0.0};               // e^{beta J}
  std::map<VariableKey, Complex> x_assignment;  // x_k -> (sum_a e^{beta k B_a}) / (e^{beta J}-1)
  Complex value{0.0, 0.0};
};

/// Z(G) = (e^{beta J} - 1)^{|V|} W(G, omega; {x_k}, e^{beta J}) for the
/// integer-scaled family, with x_k = (sum_a e^{beta k B_a}) / (e^{beta J}-1).
inline WReduction reduce_to_w(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                              const PottsOptions& opts = {}) {
  if (spec.family != FieldFamily::integer_scaled)
    throw_error(errc::spec_mismatch, "reduce_to_w needs the integer-scaled family");
  (void)embed_general(spec, g);  // full validation
  const double j = spec.j.constant_value();

  WReduction red;
  red.y_value = std::exp(Complex(spec.beta * j));
  const Complex v = red.y_value - 1.0;
  if (std::abs(v) < 1e-300)
    throw_error(errc::degenerate_transform,
                "e^{beta J} = 1 makes the W prefactor vanish; evaluate Z directly instead");

  std::map<std::string, SemigroupWeight> ks;
  for (const auto& [id, w] : g.vertices())
    ks.emplace(id, SemigroupWeight::integer(spec.multipliers.at(id)));
  red.integer_graph = g.with_vertex_weights(ks);

  red.w = w_polynomial(red.integer_graph, opts.engine);
  red.prefactor = std::pow(v, static_cast<double>(g.vertex_count()));

  std::map<VariableKey, Complex> env;
  for (const auto& key : red.w.variables()) {
    if (key.kind == VariableKey::Kind::weight) {
      SemigroupWeight w = parse_weight(key.name);
      // x_k = X_{kB} / (e^{beta J} - 1)
      Complex x = 0.0;
      for (const auto& b : spec.base_field) {
        Complex scaled = detail::scale_by_bigint(b, w.as_integer()).to_complex();
        x += std::exp(spec.beta * scaled);
      }
      env.emplace(key, x / v);
    } else if (key == symbol_y()) {
      env.emplace(key, red.y_value);
    }
  }
  red.x_assignment = env;
  red.value = red.prefactor * red.w.eval(env);
  return red;
}

struct ZeroFieldResult {
  Complex zt{0.0, 0.0};                   // Z_T(G; q, {e^{beta J_e} - 1})
  std::optional<Complex> tutte_route;     // q^{k} v^{|V|-k} T(G; (q+v)/v, v+1), constant J only
};

/// The classical zero-field identities. Both routes are evaluated when J is
/// constant; only the multivariate route exists for edge-dependent J.
inline ZeroFieldResult classical_zero_field(const WeightedMultigraph& g, int q, double beta,
                                            const Interactions& j,
                                            const PottsOptions& opts = {}) {
  if (q < 1) throw_error(errc::spec_mismatch, "q must be at least 1");
  ZeroFieldResult res;

  SparsePolynomial zt = multivariate_tutte(g, opts.engine);
  std::map<VariableKey, Complex> env;
  for (const auto& key : zt.variables()) {
    if (key == symbol_theta())
      env.emplace(key, Complex(static_cast<double>(q)));
    else if (key.kind == VariableKey::Kind::edge)
      env.emplace(key, std::exp(Complex(beta * j.at(key.name))) - 1.0);
  }
  res.zt = zt.eval(env);

  if (j.is_constant()) {
    const Complex v = std::exp(Complex(beta * j.constant_value())) - 1.0;
    if (std::abs(v) < 1e-300) {
      // J = 0 collapses to q^{|V|}; the Tutte-route change of variables
      // divides by v and is undefined here
      res.tutte_route.reset();
    } else {
      SparsePolynomial t = tutte_polynomial(g, opts.engine);
      const int k = g.components_all().k;
      std::map<VariableKey, Complex> t_env{
          {symbol_x(), (static_cast<double>(q) + v) / v},
          {symbol_y(), v + 1.0},
      };
      res.tutte_route = std::pow(Complex(static_cast<double>(q)), k) *
                        std::pow(v, static_cast<double>(g.vertex_count() - k)) * t.eval(t_env);
    }
  }
  return res;
}

/// Exact-arithmetic version of the classical identity at rational (q, v):
/// returns (Z_T(G; q, v), q^k v^{|V|-k} T(G; (q+v)/v, v+1)). Equal values
/// certify the identity with zero rounding.
inline std::pair<GaussianRational, GaussianRational> classical_zero_field_exact(
    const WeightedMultigraph& g, const Rational& q, const Rational& v,
    const PottsOptions& opts = {}) {
  if (v == 0)
    throw_error(errc::degenerate_transform, "the Tutte change of variables needs v != 0");
  SparsePolynomial zt = multivariate_tutte(g, opts.engine);
  std::map<VariableKey, GaussianRational> env;
  for (const auto& key : zt.variables()) {
    if (key == symbol_theta())
      env.emplace(key, GaussianRational(q));
    else if (key.kind == VariableKey::Kind::edge)
      env.emplace(key, GaussianRational(v));
  }
  GaussianRational zt_value = zt.eval_exact(env);

  SparsePolynomial t = tutte_polynomial(g, opts.engine);
  const int k = g.components_all().k;
  std::map<VariableKey, GaussianRational> t_env{
      {symbol_x(), GaussianRational((q + v) / v)},
      {symbol_y(), GaussianRational(v + 1)},
  };
  GaussianRational route = GaussianRational(rational_pow(q, static_cast<unsigned>(k))) *
                           GaussianRational(rational_pow(
                               v, static_cast<unsigned>(g.vertex_count() - k))) *
                           t.eval_exact(t_env);
  return {zt_value, route};
}

/// Z for the single-preferred-spin Hamiltonian via V with X_z = e^{beta z}
/// + q - 1 (the value the general X formula takes on (z, 0, ..., 0)).
inline Complex preferred_spin_reduction(const HamiltonianSpec& spec,
                                        const WeightedMultigraph& g,
                                        const PottsOptions& opts = {}) {
  if (spec.family != FieldFamily::preferred)
    throw_error(errc::spec_mismatch, "preferred_spin_reduction needs the preferred family");
  return partition_via_v(spec, g, /*symbolic=*/true, opts).value;
}

/// Z for r-truncated field vectors via V; X_M = q - r + sum_{a<=r}
/// e^{beta M_a} emerges from the zero tail.
inline Complex r_field_reduction(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                 const PottsOptions& opts = {}) {
  if (spec.family != FieldFamily::r_field)
    throw_error(errc::spec_mismatch, "r_field_reduction needs the r-field family");
  return partition_via_v(spec, g, /*symbolic=*/true, opts).value;
}

struct IsingResult {
  Complex bruteforce{0.0, 0.0};  // sum over 2^|V| tau states
  Complex via_v{0.0, 0.0};       // prefactor * V evaluation
  Complex prefactor{0.0, 0.0};   // e^{-beta (sum J_e + 3 sum z_i)}

  bool consistent(double tol) const { return approx_equal(bruteforce, via_v, tol); }
};

/// Ising partition function two ways: direct tau-state summation, and the
/// prefactor-times-V formula with x_z = e^{2 beta z} + e^{4 beta z} and
/// gamma_e = e^{2 beta J_e} - 1. The transform is sometimes quoted with a
/// beta-free x_z = e^{2z} + e^{4z}; that form fails the tau-state sum for
/// beta != 1, so x_z carries beta here.
inline IsingResult ising_partition(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                   const PottsOptions& opts = {}) {
  if (spec.family != FieldFamily::ising)
    throw_error(errc::spec_mismatch, "ising_partition needs the ising family");
  GeneralEmbedding em = embed_general(spec, g);

  IsingResult res;
  res.prefactor = em.prefactor;
  res.bruteforce = partition_bruteforce(spec, g, opts);

  // V over the scalar-weighted graph: contraction adds the z values
  WeightedMultigraph gz;
  for (const auto& [id, w] : g.vertices())
    gz.add_vertex(id, SemigroupWeight::scalar(detail::require_scalar_field(spec, id)));
  for (const auto& [id, e] : g.edges()) gz.add_edge(id, e.u, e.v, EdgeWeight::symbolic());

  SparsePolynomial v = v_state_sum(gz, opts.engine);
  std::map<VariableKey, Complex> env;
  for (const auto& key : v.variables()) {
    if (key.kind == VariableKey::Kind::weight) {
      Complex z = parse_weight(key.name).gauss_entries()[0].to_complex();
      env.emplace(key, std::exp(2.0 * spec.beta * z) + std::exp(4.0 * spec.beta * z));
    } else if (key.kind == VariableKey::Kind::edge) {
      env.emplace(key, std::exp(Complex(2.0 * spec.beta * spec.j.at(key.name))) - 1.0);
    }
  }
  res.via_v = res.prefactor * v.eval(env);
  return res;
}

/// Ising spin glass (all z_i = 0):
///     Z = e^{-beta sum J_e} Z_T(G; q=2, {e^{2 beta J_e} - 1}).
inline Complex spin_glass_value(const WeightedMultigraph& g, double beta, const Interactions& j,
                                const PottsOptions& opts = {}) {
  SparsePolynomial zt = multivariate_tutte(g, opts.engine);
  std::map<VariableKey, Complex> env;
  for (const auto& key : zt.variables()) {
    if (key == symbol_theta())
      env.emplace(key, Complex(2.0));
    else if (key.kind == VariableKey::Kind::edge)
      env.emplace(key, std::exp(Complex(2.0 * beta * j.at(key.name))) - 1.0);
  }
  return std::exp(Complex(-beta * j.sum_over(g))) * zt.eval(env);
}

/// Random Field Ising Model: constant J, per-vertex local fields.
inline IsingResult rfim_partition(const WeightedMultigraph& g, double beta, double j,
                                  const std::map<std::string, GaussianRational>& zs,
                                  const PottsOptions& opts = {}) {
  return ising_partition(HamiltonianSpec::ising(beta, Interactions::constant(j), zs), g, opts);
}

}  // namespace vpoly
