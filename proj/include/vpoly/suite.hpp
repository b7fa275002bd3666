#pragma once

#include <complex>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vpoly/engine.hpp"
#include "vpoly/errors.hpp"
#include "vpoly/exact.hpp"
#include "vpoly/io.hpp"
#include "vpoly/multigraph.hpp"
#include "vpoly/potts.hpp"
#include "vpoly/weights.hpp"

namespace vpoly {

/// Deterministic random source. Bounded draws go through the raw mt19937_64
/// stream rather than std distributions, whose output differs across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

  int range(int lo, int hi) { return lo + below(hi - lo + 1); }

  bool chance(int percent) { return below(100) < percent; }

  /// Exact rational in [-bound, bound] with denominator up to max_den.
  Rational rational(int bound, int max_den) {
    int den = range(1, max_den);
    int num = range(-bound * den, bound * den);
    return make_rational(num, den);
  }

 private:
  std::mt19937_64 engine_;
};

struct GraphGenOptions {
  int min_vertices = 1;
  int max_vertices = 6;
  int max_edges = 7;
  bool connected = false;
  bool allow_loops = true;
};

/// Random multigraph skeleton with unit integer weights. Loops and parallel
/// edges arise naturally from uniform endpoint choice.
inline WeightedMultigraph random_structure(Rng& rng, const GraphGenOptions& opts = {}) {
  const int n = rng.range(opts.min_vertices, opts.max_vertices);
  WeightedMultigraph g;
  std::vector<std::string> ids;
  for (int i = 1; i <= n; ++i) {
    ids.push_back("v" + std::to_string(i));
    g.add_vertex(ids.back(), SemigroupWeight::integer(1));
  }
  int next_edge = 1;
  if (opts.connected) {
    for (int i = 1; i < n; ++i)
      g.add_edge("e" + std::to_string(next_edge++), ids[rng.below(i)], ids[i]);
  }
  const int remaining = opts.max_edges - static_cast<int>(g.edge_count());
  const int extra = remaining > 0 ? rng.range(0, remaining) : 0;
  for (int i = 0; i < extra; ++i) {
    std::string u = ids[rng.below(n)];
    std::string v = ids[rng.below(n)];
    if (!opts.allow_loops && u == v) {
      if (n == 1) continue;
      while (v == u) v = ids[rng.below(n)];
    }
    g.add_edge("e" + std::to_string(next_edge++), u, v);
  }
  return g;
}

/// Random graph with integer-vector weights (entries in [-3, 3], length 2
/// or 3 fixed per graph).
inline WeightedMultigraph random_integer_vector_graph(Rng& rng,
                                                      const GraphGenOptions& opts = {}) {
  WeightedMultigraph skeleton = random_structure(rng, opts);
  const int dim = rng.range(2, 3);
  std::map<std::string, SemigroupWeight> ws;
  for (const auto& [id, w] : skeleton.vertices()) {
    std::vector<BigInt> entries;
    for (int d = 0; d < dim; ++d) entries.emplace_back(rng.range(-3, 3));
    ws.emplace(id, SemigroupWeight::integer_vector(std::move(entries)));
  }
  return skeleton.with_vertex_weights(ws);
}

/// Random graph with positive integer weights in 1..4 (the W-polynomial's
/// domain).
inline WeightedMultigraph random_positive_integer_graph(Rng& rng,
                                                        const GraphGenOptions& opts = {}) {
  WeightedMultigraph skeleton = random_structure(rng, opts);
  std::map<std::string, SemigroupWeight> ws;
  for (const auto& [id, w] : skeleton.vertices())
    ws.emplace(id, SemigroupWeight::integer(rng.range(1, 4)));
  return skeleton.with_vertex_weights(ws);
}

/// A general-field Potts instance bundled with its graph document. The
/// graph document redundantly carries the field vectors as vertex weights
/// and the interaction energies as edge {"J"} annotations, so `verify` can
/// cross-check the two sources.
struct PottsInstance {
  HamiltonianSpec spec;
  GraphDocument doc;
};

inline PottsInstance random_general_instance(Rng& rng, const GraphGenOptions& gopts = {}) {
  PottsInstance inst;
  const int q = rng.chance(50) ? 2 : 3;
  const double beta = rng.chance(50) ? 0.5 : 1.0;

  WeightedMultigraph skeleton = random_structure(rng, gopts);
  std::map<std::string, std::vector<GaussianRational>> fields;
  std::map<std::string, SemigroupWeight> weights;
  for (const auto& [id, w] : skeleton.vertices()) {
    std::vector<GaussianRational> m;
    for (int a = 0; a < q; ++a) m.emplace_back(rng.rational(2, 4));
    weights.emplace(id, SemigroupWeight::gaussian_vector(m));
    fields.emplace(id, std::move(m));
  }
  std::map<std::string, double> js;
  for (const auto& [id, e] : skeleton.edges())
    js[id] = rational_to_double(rng.rational(2, 4));

  inst.spec = HamiltonianSpec::general(q, beta, Interactions::per_edge(js), std::move(fields));
  inst.doc.graph = skeleton.with_vertex_weights(weights);
  inst.doc.q = q;
  inst.doc.edge_j = std::move(js);
  return inst;
}

/// The epsilon-subset-sum set {sum eps_i M_i : eps_i in {0,1}} of the field
/// vectors, as canonical weight keys. Every x variable of the symbolic V
/// used in the Z = V evaluation must index into this set.
inline std::set<std::string> subset_sum_weight_keys(
    const std::map<std::string, std::vector<GaussianRational>>& fields, int q) {
  std::set<std::string> keys;
  std::vector<SemigroupWeight> sums{
      SemigroupWeight::gaussian_vector(
          std::vector<GaussianRational>(static_cast<std::size_t>(q), GaussianRational(0)))};
  for (const auto& [id, m] : fields) {
    const SemigroupWeight w = SemigroupWeight::gaussian_vector(m);
    std::vector<SemigroupWeight> expanded = sums;
    for (const auto& s : sums) expanded.push_back(add(s, w));
    sums = std::move(expanded);
  }
  for (const auto& s : sums) keys.insert(canonical_key(s));
  return keys;
}

// ---------------------------------------------------------------------------
// the oracle triangle and the verify harness
// ---------------------------------------------------------------------------

/// Z computed four independent ways. All pairwise deviations must sit
/// within the relative tolerance.
struct TriangleReport {
  Complex bruteforce{0, 0};
  Complex deletion_contraction{0, 0};
  Complex via_v{0, 0};
  Complex fk_sum{0, 0};
  double max_relative_deviation = 0.0;

  bool ok(double tol) const { return max_relative_deviation <= tol; }
};

inline TriangleReport oracle_triangle(const HamiltonianSpec& brute_spec,
                                      const HamiltonianSpec& poly_spec,
                                      const WeightedMultigraph& g,
                                      const PottsOptions& opts = {}) {
  TriangleReport rep;
  rep.bruteforce = partition_bruteforce(brute_spec, g, opts);
  rep.deletion_contraction = partition_deletion_contraction(brute_spec, g, opts);
  rep.via_v = partition_via_v(poly_spec, g, /*symbolic=*/!poly_spec.numeric_only(), opts).value;
  rep.fk_sum = poly_spec.numeric_only()
                   ? partition_via_v(poly_spec, g, false, opts).value
                   : fk_expansion(poly_spec, g, opts).total;
  const Complex vals[4] = {rep.bruteforce, rep.deletion_contraction, rep.via_v, rep.fk_sum};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      rep.max_relative_deviation =
          std::max(rep.max_relative_deviation, relative_deviation(vals[i], vals[j]));
  return rep;
}

inline TriangleReport oracle_triangle(const HamiltonianSpec& spec, const WeightedMultigraph& g,
                                      const PottsOptions& opts = {}) {
  return oracle_triangle(spec, spec, g, opts);
}

struct VerifyResult {
  bool ok = true;
  std::string message;     // human-readable verdict
  json counterexample;     // reproducible bundle when !ok
};

/// Cross-validates one instance. Brute force and deletion-contraction read
/// the spec; the V evaluation and FK expansion read the graph document's
/// redundant copies (vertex weights as field vectors, edge {"J"} values)
/// whenever the general-family document carries them. Disagreement between
/// the sources is exactly what this is meant to catch.
inline VerifyResult verify_instance(const HamiltonianSpec& spec, const GraphDocument& doc,
                                    double tolerance, const PottsOptions& opts = {}) {
  const WeightedMultigraph& g = doc.graph;
  (void)embed_general(spec, g);  // validate before computing anything
  // the polynomial-side routes carry family prefactors themselves, so the
  // spec passes through unembedded; only general-family documents can
  // override it with their redundant copies
  HamiltonianSpec poly_spec = spec;
  if (spec.family == FieldFamily::general && !spec.numeric_only()) {
    if (doc.covers_all_edges_with_j())
      poly_spec.j = Interactions::per_edge(doc.edge_j);
    bool weights_are_fields = !g.vertices().empty();
    for (const auto& [id, w] : g.vertices())
      if (w.kind() != WeightKind::gaussian_rational_vector ||
          w.dimension() != static_cast<std::size_t>(spec.q))
        weights_are_fields = false;
    if (weights_are_fields) {
      poly_spec.vector_fields.clear();
      for (const auto& [id, w] : g.vertices())
        poly_spec.vector_fields.emplace(id, w.gauss_entries());
    }
  }

  TriangleReport rep = oracle_triangle(spec, poly_spec, g, opts);
  VerifyResult res;
  res.ok = rep.ok(tolerance);
  res.message = res.ok
                    ? "agreement within " + format_double(tolerance) +
                          " (max relative deviation " +
                          format_double(rep.max_relative_deviation) + ")"
                    : "routes disagree: max relative deviation " +
                          format_double(rep.max_relative_deviation) + " exceeds " +
                          format_double(tolerance);
  if (!res.ok) {
    res.counterexample = {
        {"spec", spec_to_json(spec)},
        {"graph", graph_to_json(doc)},
        {"values",
         {{"bruteforce", complex_to_json(rep.bruteforce)},
          {"deletion_contraction", complex_to_json(rep.deletion_contraction)},
          {"via_v", complex_to_json(rep.via_v)},
          {"fk_sum", complex_to_json(rep.fk_sum)}}},
        {"max_relative_deviation", rep.max_relative_deviation},
        {"tolerance", tolerance},
    };
  }
  return res;
}

/// The seeded random suite behind `verify --seed N --cases K`: general-field
/// instances run through the oracle triangle; the first failure is reported
/// as a reproducible bundle.
inline VerifyResult verify_random_suite(std::uint64_t seed, int cases, double tolerance,
                                        const PottsOptions& opts = {}) {
  Rng rng(seed);
  GraphGenOptions gopts;
  gopts.max_vertices = 5;
  gopts.max_edges = 7;
  for (int i = 0; i < cases; ++i) {
    PottsInstance inst = random_general_instance(rng, gopts);
    VerifyResult res = verify_instance(inst.spec, inst.doc, tolerance, opts);
    if (!res.ok) {
      res.counterexample["seed"] = seed;
      res.counterexample["case"] = i;
      res.message = "case " + std::to_string(i) + " of seed " + std::to_string(seed) + ": " +
                    res.message;
      return res;
    }
  }
  VerifyResult res;
  res.ok = true;
  res.message = std::to_string(cases) + " random instances agree within " +
                format_double(tolerance);
  return res;
}

// ---------------------------------------------------------------------------
// instance bundle files ({"spec": ..., "graph": ...})
// ---------------------------------------------------------------------------

struct InstanceBundle {
  HamiltonianSpec spec;
  GraphDocument doc;
};

inline InstanceBundle parse_bundle_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("spec") || !doc.contains("graph"))
    throw_error(errc::parse_error, "bundle must contain \"spec\" and \"graph\"");
  InstanceBundle b;
  b.spec = parse_spec_json(doc.at("spec"));
  b.doc = parse_graph_json(doc.at("graph"));
  return b;
}

inline InstanceBundle load_bundle_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(errc::parse_error, "cannot open bundle file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const std::exception& e) {
    throw_error(errc::parse_error, e.what());
  }
  return parse_bundle_json(doc);
}

inline json bundle_to_json(const InstanceBundle& b) {
  return json{{"spec", spec_to_json(b.spec)}, {"graph", graph_to_json(b.doc)}};
}

}  // namespace vpoly
