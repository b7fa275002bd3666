#pragma once

#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vpoly/errors.hpp"
#include "vpoly/exact.hpp"
#include "vpoly/multigraph.hpp"
#include "vpoly/polynomial.hpp"
#include "vpoly/weights.hpp"

namespace vpoly {

/// Which non-loop edge the deletion-contraction recursion pivots on. The
/// result is order-independent; two fixed orders exist so that fact can be
/// tested rather than assumed.
enum class EdgeOrder { lowest_id_first, highest_id_first };

struct EngineOptions {
  // 2^max_edges subsets pre-collection; honest desk-scale bound
  int max_edges = 24;
  EdgeOrder order = EdgeOrder::lowest_id_first;
  // canonical-encoding memo for the recursion; pays off only when edge
  // weights collide (e.g. numeric evaluation with uniform gamma)
  bool use_memo = false;
  int threads = 1;
};

namespace detail {

inline void check_edge_cap(const WeightedMultigraph& g, const EngineOptions& opts) {
  // 62 is a hard bound: subsets are enumerated through 64-bit masks
  if (static_cast<int>(g.edge_count()) > std::min(opts.max_edges, 62))
    throw_error(errc::too_large, "graph has " + std::to_string(g.edge_count()) +
                                     " edges; cap is " + std::to_string(opts.max_edges) +
                                     " (raise --max-edges to override)");
}

/// gamma_e as a polynomial factor. Symbolic edges become their variable;
/// exact values become constants; complex doubles cannot enter an exact
/// polynomial.
inline SparsePolynomial gamma_poly(const std::string& edge_id, const EdgeWeight& w) {
  switch (w.kind()) {
    case EdgeWeight::Kind::symbolic:
      return SparsePolynomial::variable(VariableKey::edge(edge_id));
    case EdgeWeight::Kind::exact:
      return SparsePolynomial::constant(w.exact_value());
    case EdgeWeight::Kind::numeric:
      throw_error(errc::inexact_edge_weight,
                  "edge '" + edge_id + "' has a non-exact numeric weight; "
                  "symbolic computation needs symbolic or exact gamma values");
  }
  throw_error(errc::internal_check, "unreachable edge weight kind");
}

inline Monomial vertex_weight_monomial(const WeightedMultigraph& g) {
  std::vector<Monomial::Factor> factors;
  for (const auto& [id, w] : g.vertices())
    factors.emplace_back(VariableKey::weight(canonical_key(w)), 1);
  return Monomial::from_factors(std::move(factors));
}

/// One spanning-subgraph term of the V state sum.
inline void add_subset_term(SparsePolynomial& acc, const WeightedMultigraph& g,
                            const std::vector<std::string>& edge_ids, std::uint64_t mask) {
  std::vector<std::string> subset;
  GaussianRational coeff(1);
  std::vector<Monomial::Factor> factors;
  for (std::size_t i = 0; i < edge_ids.size(); ++i) {
    if (!(mask >> i & 1u)) continue;
    subset.push_back(edge_ids[i]);
    const EdgeWeight& w = g.edge(edge_ids[i]).gamma;
    if (w.is_symbolic())
      factors.emplace_back(VariableKey::edge(edge_ids[i]), 1);
    else if (w.kind() == EdgeWeight::Kind::exact)
      coeff *= w.exact_value();
    else
      throw_error(errc::inexact_edge_weight, "edge '" + edge_ids[i] + "' is not exact");
  }
  ComponentReport rep = g.components(subset);
  for (const auto& comp : rep.components)
    factors.emplace_back(VariableKey::weight(canonical_key(comp.weight_sum)), 1);
  acc.add_term(Monomial::from_factors(std::move(factors)), coeff);
}

}  // namespace detail

/// V(G) as the spanning-subgraph sum
///     sum over A of  x_{c_1} ... x_{c_k(A)}  prod_{e in A} gamma_e,
/// where c_l is the semigroup sum of the vertex weights in the l-th
/// component of (V, A).
inline SparsePolynomial v_state_sum(const WeightedMultigraph& g,
                                    const EngineOptions& opts = {}) {
  detail::check_edge_cap(g, opts);
  const std::vector<std::string> edge_ids = g.edge_ids();
  const std::uint64_t total = std::uint64_t(1) << edge_ids.size();

  int workers = opts.threads;
  if (workers <= 1 || total < 1024) {
    SparsePolynomial acc;
    for (std::uint64_t mask = 0; mask < total; ++mask)
      detail::add_subset_term(acc, g, edge_ids, mask);
    return acc;
  }

  std::vector<SparsePolynomial> partial(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::uint64_t lo = total * w / workers;
      const std::uint64_t hi = total * (w + 1) / workers;
      for (std::uint64_t mask = lo; mask < hi; ++mask)
        detail::add_subset_term(partial[w], g, edge_ids, mask);
    });
  }
  for (auto& t : pool) t.join();
  SparsePolynomial acc;  // merge in worker order; exact arithmetic, so the
  for (auto& p : partial) acc += p;  // value is order-independent anyway
  return acc;
}

namespace detail {

inline std::string pick_pivot(const WeightedMultigraph& g, EdgeOrder order) {
  std::string pivot;
  for (const auto& [id, e] : g.edges()) {
    if (e.is_loop()) continue;
    if (pivot.empty()) {
      pivot = id;
      if (order == EdgeOrder::lowest_id_first) break;  // map is id-sorted
    } else if (order == EdgeOrder::highest_id_first && id > pivot) {
      pivot = id;
    }
  }
  return pivot;
}

inline SparsePolynomial v_recurse(const WeightedMultigraph& g, const EngineOptions& opts,
                                  std::unordered_map<std::string, SparsePolynomial>* memo) {
  std::string key;
  if (memo) {
    key = g.canonical_encoding();
    auto it = memo->find(key);
    if (it != memo->end()) return it->second;
  }

  SparsePolynomial result;
  // factor loops eagerly: V(G) = (gamma_e + 1) V(G - e)
  std::vector<std::string> loops;
  for (const auto& [id, e] : g.edges())
    if (e.is_loop()) loops.push_back(id);
  if (!loops.empty()) {
    WeightedMultigraph rest = g;
    SparsePolynomial factor = SparsePolynomial::constant(GaussianRational(1));
    for (const auto& id : loops) {
      factor *= gamma_poly(id, g.edge(id).gamma) +
                SparsePolynomial::constant(GaussianRational(1));
      rest = rest.delete_edge(id);
    }
    result = factor * v_recurse(rest, opts, memo);
  } else if (g.edge_count() == 0) {
    result = SparsePolynomial::term(vertex_weight_monomial(g), GaussianRational(1));
  } else {
    const std::string pivot = pick_pivot(g, opts.order);
    result = v_recurse(g.delete_edge(pivot), opts, memo) +
             gamma_poly(pivot, g.edge(pivot).gamma) *
                 v_recurse(g.contract_edge(pivot), opts, memo);
  }

  if (memo) memo->emplace(std::move(key), result);
  return result;
}

}  // namespace detail

/// V(G) by the defining recursion: V(G-e) + gamma_e V(G/e) on non-loop
/// edges, (gamma_e + 1) V(G-e) on loops, prod x_{omega_i} when edgeless.
/// Identical to v_state_sum for every input.
inline SparsePolynomial v_deletion_contraction(const WeightedMultigraph& g,
                                               const EngineOptions& opts = {}) {
  detail::check_edge_cap(g, opts);
  std::unordered_map<std::string, SparsePolynomial> memo;
  return detail::v_recurse(g, opts, opts.use_memo ? &memo : nullptr);
}

/// One edge's coefficients in the universality (recipe) transform
///     f(G) = alpha_e f(G-e) + beta_e f(G/e).
/// beta may be any polynomial (a constant, a gamma variable, y-1, ...).
struct EdgeCoefficient {
  GaussianRational alpha;
  SparsePolynomial beta;
};

/// Evaluates the function defined by the recipe coefficients:
///     f(G) = (prod alpha_e) * V(G, omega; x, {beta_e / alpha_e}).
/// An optional substitution rewrites the x variables afterwards.
inline SparsePolynomial recipe_transform(
    const WeightedMultigraph& g, const std::map<std::string, EdgeCoefficient>& coeffs,
    const std::map<VariableKey, SparsePolynomial>& x_substitution = {},
    const EngineOptions& opts = {}) {
  for (const auto& [id, e] : g.edges()) {
    auto it = coeffs.find(id);
    if (it == coeffs.end())
      throw_error(errc::unknown_edge, "no recipe coefficients for edge '" + id + "'");
    if (it->second.alpha.is_zero())
      throw_error(errc::zero_alpha, "alpha is zero on edge '" + id + "'");
    if (!e.gamma.is_symbolic())
      throw_error(errc::inexact_edge_weight,
                  "recipe transform expects symbolic edge weights ('" + id + "')");
  }
  SparsePolynomial f = v_deletion_contraction(g, opts);
  GaussianRational alpha_product(1);
  for (const auto& [id, ce] : coeffs) {
    if (!g.has_edge(id)) continue;
    f = f.substituted(VariableKey::edge(id),
                      ce.beta.scaled(GaussianRational(1) / ce.alpha));
    alpha_product *= ce.alpha;
  }
  for (const auto& [key, repl] : x_substitution) f = f.substituted(key, repl);
  return f.scaled(alpha_product);
}

namespace detail {

inline void check_positive_integer_weights(const WeightedMultigraph& g) {
  for (const auto& [id, w] : g.vertices())
    if (!w.is_positive_integer())
      throw_error(errc::non_positive_weight,
                  "vertex '" + id + "' must carry a positive integer weight");
}

}  // namespace detail

/// W(G) straight from its spanning-subgraph form:
///     sum over A of  x_{c_1} ... x_{c_k(A)} (y-1)^{|A| - r(A)}.
/// `y` may be the y symbol or any polynomial/constant.
inline SparsePolynomial w_state_sum(const WeightedMultigraph& g,
                                    const SparsePolynomial& y,
                                    const EngineOptions& opts = {}) {
  detail::check_positive_integer_weights(g);
  detail::check_edge_cap(g, opts);
  const std::vector<std::string> edge_ids = g.edge_ids();
  const std::uint64_t total = std::uint64_t(1) << edge_ids.size();
  const SparsePolynomial y_minus_1 = y - SparsePolynomial::constant(GaussianRational(1));
  std::map<int, SparsePolynomial> nullity_pow;
  SparsePolynomial acc;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < edge_ids.size(); ++i)
      if (mask >> i & 1u) subset.push_back(edge_ids[i]);
    ComponentReport rep = g.components(subset);
    std::vector<Monomial::Factor> factors;
    for (const auto& comp : rep.components)
      factors.emplace_back(VariableKey::weight(canonical_key(comp.weight_sum)), 1);
    auto it = nullity_pow.find(rep.n);
    if (it == nullity_pow.end())
      it = nullity_pow.emplace(rep.n, y_minus_1.pow(static_cast<unsigned>(rep.n))).first;
    acc += SparsePolynomial::term(Monomial::from_factors(std::move(factors)),
                                  GaussianRational(1)) *
           it->second;
  }
  return acc;
}

/// W(G) recovered from the V-polynomial:
///     V(G, omega; x, gamma_e = y-1) = (y-1)^{|V|} W(G, omega; x/(y-1), y).
/// Mechanically: set every gamma to an atom u, rescale each x by u, strip
/// u^{|V|} (every term carries at least that power), then expand u = y-1.
inline SparsePolynomial w_from_v(const WeightedMultigraph& g, const SparsePolynomial& y,
                                 const EngineOptions& opts = {}) {
  detail::check_positive_integer_weights(g);
  const VariableKey u = VariableKey::symbol("_u");
  // W never consumes edge values; compute V with formal gammas throughout
  SparsePolynomial v = v_deletion_contraction(g.with_symbolic_edges(), opts);
  v = v.substituted_kind(VariableKey::Kind::edge, SparsePolynomial::variable(u));
  SparsePolynomial rescaled;
  for (const auto& [m, c] : v.terms()) {
    int x_degree = m.degree_of_kind(VariableKey::Kind::weight);
    rescaled.add_term(m * Monomial::variable(u, x_degree), c);
  }
  const int n_vertices = static_cast<int>(g.vertex_count());
  SparsePolynomial stripped;
  for (const auto& [m, c] : rescaled.terms())
    stripped.add_term(m.divide_by(u, n_vertices), c);
  return stripped.substituted(u, y - SparsePolynomial::constant(GaussianRational(1)));
}

/// W(G; x, y), computed by the state sum and by the V specialization; the
/// two must coincide identically.
inline SparsePolynomial w_polynomial(const WeightedMultigraph& g,
                                     const SparsePolynomial& y,
                                     const EngineOptions& opts = {}) {
  SparsePolynomial direct = w_state_sum(g, y, opts);
  SparsePolynomial via_v = w_from_v(g, y, opts);
  if (direct != via_v)
    throw_error(errc::internal_check, "W state sum and V specialization disagree");
  return direct;
}

inline SparsePolynomial w_polynomial(const WeightedMultigraph& g,
                                     const EngineOptions& opts = {}) {
  return w_polynomial(g, SparsePolynomial::variable(symbol_y()), opts);
}

/// U(G) = W of the same graph with every vertex weight set to 1.
inline SparsePolynomial u_polynomial(const WeightedMultigraph& g,
                                     const SparsePolynomial& y,
                                     const EngineOptions& opts = {}) {
  return w_polynomial(g.with_uniform_weight(SemigroupWeight::integer(1)), y, opts);
}

inline SparsePolynomial u_polynomial(const WeightedMultigraph& g,
                                     const EngineOptions& opts = {}) {
  return u_polynomial(g, SparsePolynomial::variable(symbol_y()), opts);
}

/// Multivariate Tutte polynomial, directly from its defining subset sum
///     Z_T(G; theta, gamma) = sum over A of theta^{k(A)} prod_{e in A} gamma_e.
/// Independent of vertex weights.
inline SparsePolynomial multivariate_tutte_direct(const WeightedMultigraph& g,
                                                  const SparsePolynomial& theta,
                                                  const EngineOptions& opts = {}) {
  detail::check_edge_cap(g, opts);
  const std::vector<std::string> edge_ids = g.edge_ids();
  const std::uint64_t total = std::uint64_t(1) << edge_ids.size();
  std::map<int, SparsePolynomial> theta_pow;
  SparsePolynomial acc;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<std::string> subset;
    GaussianRational coeff(1);
    std::vector<Monomial::Factor> factors;
    for (std::size_t i = 0; i < edge_ids.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      subset.push_back(edge_ids[i]);
      const EdgeWeight& w = g.edge(edge_ids[i]).gamma;
      if (w.is_symbolic())
        factors.emplace_back(VariableKey::edge(edge_ids[i]), 1);
      else if (w.kind() == EdgeWeight::Kind::exact)
        coeff *= w.exact_value();
      else
        throw_error(errc::inexact_edge_weight, "edge '" + edge_ids[i] + "' is not exact");
    }
    ComponentReport rep = g.components(subset);
    auto it = theta_pow.find(rep.k);
    if (it == theta_pow.end())
      it = theta_pow.emplace(rep.k, theta.pow(static_cast<unsigned>(rep.k))).first;
    acc += SparsePolynomial::term(Monomial::from_factors(std::move(factors)), coeff) *
           it->second;
  }
  return acc;
}

/// Z_T via both routes: the subset sum above, and x_w -> theta substitution
/// in V (which must agree for every weight function).
inline SparsePolynomial multivariate_tutte(const WeightedMultigraph& g,
                                           const SparsePolynomial& theta,
                                           const EngineOptions& opts = {}) {
  SparsePolynomial direct = multivariate_tutte_direct(g, theta, opts);
  SparsePolynomial via_v =
      v_deletion_contraction(g, opts).substituted_kind(VariableKey::Kind::weight, theta);
  if (direct != via_v)
    throw_error(errc::internal_check, "Z_T subset sum and V substitution disagree");
  return direct;
}

inline SparsePolynomial multivariate_tutte(const WeightedMultigraph& g,
                                           const EngineOptions& opts = {}) {
  return multivariate_tutte(g, SparsePolynomial::variable(symbol_theta()), opts);
}

/// The rank-nullity oracle
///     T(G; x, y) = sum over A of (x-1)^{r(E)-r(A)} (y-1)^{n(A)}.
inline SparsePolynomial tutte_rank_nullity(const WeightedMultigraph& g,
                                           const EngineOptions& opts = {}) {
  detail::check_edge_cap(g, opts);
  const std::vector<std::string> edge_ids = g.edge_ids();
  const std::uint64_t total = std::uint64_t(1) << edge_ids.size();
  const SparsePolynomial x_minus_1 =
      SparsePolynomial::variable(symbol_x()) - SparsePolynomial::constant(GaussianRational(1));
  const SparsePolynomial y_minus_1 =
      SparsePolynomial::variable(symbol_y()) - SparsePolynomial::constant(GaussianRational(1));
  const int rank_full = g.components_all().r;
  std::map<std::pair<int, int>, SparsePolynomial> cache;
  SparsePolynomial acc;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < edge_ids.size(); ++i)
      if (mask >> i & 1u) subset.push_back(edge_ids[i]);
    ComponentReport rep = g.components(subset);
    auto key = std::make_pair(rank_full - rep.r, rep.n);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache
               .emplace(key, x_minus_1.pow(static_cast<unsigned>(key.first)) *
                                 y_minus_1.pow(static_cast<unsigned>(key.second)))
               .first;
    acc += it->second;
  }
  return acc;
}

/// T(G; x, y) recovered through the W/V tower: substitute x_w -> theta in W,
/// peel off theta^{k(G)} (W(x_i=theta, y) = theta^{k(G)} T(G; 1+theta, y)),
/// then set theta = x-1. Cross-checked against the rank-nullity sum.
inline SparsePolynomial tutte_polynomial(const WeightedMultigraph& g,
                                         const EngineOptions& opts = {}) {
  const WeightedMultigraph unit =
      g.with_uniform_weight(SemigroupWeight::integer(1)).with_symbolic_edges();
  const VariableKey theta = symbol_theta();
  SparsePolynomial w = w_polynomial(unit, opts);
  SparsePolynomial p = w.substituted_kind(VariableKey::Kind::weight,
                                          SparsePolynomial::variable(theta));
  const int k_g = unit.components_all().k;
  SparsePolynomial peeled;
  for (const auto& [m, c] : p.terms()) peeled.add_term(m.divide_by(theta, k_g), c);
  SparsePolynomial tower = peeled.substituted(
      theta, SparsePolynomial::variable(symbol_x()) -
                 SparsePolynomial::constant(GaussianRational(1)));
  SparsePolynomial oracle = tutte_rank_nullity(g, opts);
  if (tower != oracle)
    throw_error(errc::internal_check, "Tutte tower and rank-nullity oracle disagree");
  return tower;
}

}  // namespace vpoly
