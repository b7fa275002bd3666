#pragma once

#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpoly/errors.hpp"
#include "vpoly/exact.hpp"
#include "vpoly/multigraph.hpp"
#include "vpoly/polynomial.hpp"
#include "vpoly/potts.hpp"
#include "vpoly/weights.hpp"

namespace vpoly {

using nlohmann::json;

// ---------------------------------------------------------------------------
// exact number entries: JSON number | "p/q" string | {"re":..., "im":...}
// ---------------------------------------------------------------------------

/// JSON integers are exact; other JSON numbers are converted from their
/// double value (a dyadic rational, hence still exact). Strings accept
/// "p/q", decimals, and "a+bi" complex forms.
inline GaussianRational parse_exact_entry(const json& v, const std::string& where) {
  try {
    if (v.is_number_integer()) return GaussianRational(Rational(BigInt(v.get<long long>())));
    if (v.is_number()) return GaussianRational(rational_from_double(v.get<double>()));
    if (v.is_string()) return gaussian_from_key_string(v.get<std::string>());
    if (v.is_object()) {
      GaussianRational re(0), im(0);
      if (v.contains("re")) re = parse_exact_entry(v.at("re"), where + ".re");
      if (v.contains("im")) im = parse_exact_entry(v.at("im"), where + ".im");
      if (!re.is_real() || !im.is_real())
        throw_error(errc::parse_error, where + ": nested complex parts");
      return {re.re, im.re};
    }
  } catch (const error&) {
    throw;
  } catch (const std::exception& e) {
    throw_error(errc::parse_error, where + ": " + e.what());
  }
  throw_error(errc::parse_error, where + ": expected a number, \"p/q\" string, or {re, im}");
}

inline json exact_entry_to_json(const GaussianRational& g) {
  if (g.is_real() && is_integer(g.re) &&
      numerator(g.re) <= BigInt(1) << 52 && numerator(g.re) >= -(BigInt(1) << 52))
    return json(static_cast<long long>(numerator(g.re)));
  return json(gaussian_to_key_string(g));
}

// ---------------------------------------------------------------------------
// graph files
// ---------------------------------------------------------------------------

/// A parsed graph file: the multigraph plus the optional spin count and any
/// per-edge {"J": ...} interaction annotations.
struct GraphDocument {
  WeightedMultigraph graph;
  std::optional<int> q;
  std::map<std::string, double> edge_j;

  bool covers_all_edges_with_j() const {
    for (const auto& [id, e] : graph.edges())
      if (!edge_j.count(id)) return false;
    return !graph.edges().empty();
  }
};

inline SemigroupWeight parse_weight_json(const json& v, const std::string& where) {
  if (v.is_string()) return parse_weight(v.get<std::string>());
  if (v.is_number_integer()) return SemigroupWeight::integer(BigInt(v.get<long long>()));
  if (v.is_array()) {
    bool all_int = true;
    for (const auto& e : v)
      if (!e.is_number_integer()) all_int = false;
    if (v.empty()) throw_error(errc::parse_error, where + ": empty weight vector");
    if (all_int) {
      std::vector<BigInt> entries;
      for (const auto& e : v) entries.emplace_back(e.get<long long>());
      return SemigroupWeight::integer_vector(std::move(entries));
    }
    std::vector<GaussianRational> entries;
    for (std::size_t i = 0; i < v.size(); ++i)
      entries.push_back(parse_exact_entry(v[i], where + "[" + std::to_string(i) + "]"));
    return SemigroupWeight::gaussian_vector(std::move(entries));
  }
  throw_error(errc::parse_error,
              where + ": expected a weight encoding string, an integer, or an array");
}

inline GraphDocument parse_graph_json(const json& doc) {
  if (!doc.is_object()) throw_error(errc::parse_error, "graph document must be a JSON object");
  GraphDocument out;
  if (doc.contains("q")) {
    if (!doc.at("q").is_number_integer() || doc.at("q").get<long long>() < 1)
      throw_error(errc::parse_error, "q: expected a positive integer");
    out.q = doc.at("q").get<int>();
  }
  if (!doc.contains("vertices") || !doc.at("vertices").is_array())
    throw_error(errc::parse_error, "missing \"vertices\" array");

  std::size_t idx = 0;
  for (const auto& v : doc.at("vertices")) {
    const std::string where = "vertices[" + std::to_string(idx++) + "]";
    if (!v.is_object() || !v.contains("id") || !v.at("id").is_string())
      throw_error(errc::parse_error, where + ": expected an object with a string \"id\"");
    const std::string id = v.at("id").get<std::string>();
    SemigroupWeight w = v.contains("weight")
                            ? parse_weight_json(v.at("weight"), where + ".weight")
                            : SemigroupWeight::integer(1);
    out.graph.add_vertex(id, std::move(w));
  }

  idx = 0;
  for (const auto& e : doc.value("edges", json::array())) {
    const std::string where = "edges[" + std::to_string(idx++) + "]";
    if (!e.is_object() || !e.contains("id") || !e.contains("u") || !e.contains("v"))
      throw_error(errc::parse_error, where + ": expected an object with id, u, v");
    const std::string id = e.at("id").get<std::string>();
    const std::string u = e.at("u").get<std::string>();
    const std::string v = e.at("v").get<std::string>();
    EdgeWeight gamma = EdgeWeight::symbolic();
    if (e.contains("gamma")) {
      const json& gv = e.at("gamma");
      if (gv.is_string() && gv.get<std::string>() == "symbolic") {
        gamma = EdgeWeight::symbolic();
      } else if (gv.is_object() && gv.contains("J")) {
        if (!gv.at("J").is_number())
          throw_error(errc::parse_error, where + ".gamma.J: expected a number");
        out.edge_j[id] = gv.at("J").get<double>();
      } else {
        gamma = EdgeWeight::exact(parse_exact_entry(gv, where + ".gamma"));
      }
    }
    out.graph.add_edge(id, u, v, std::move(gamma));
  }

  if (out.q && out.graph.weight_kind() == WeightKind::gaussian_rational_vector) {
    for (const auto& [id, w] : out.graph.vertices())
      if (w.dimension() != static_cast<std::size_t>(*out.q))
        throw_error(errc::parse_error,
                    "vertex '" + id + "' weight vector length differs from q");
  }
  return out;
}

inline GraphDocument parse_graph_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw_error(errc::parse_error, e.what());
  }
  return parse_graph_json(doc);
}

inline GraphDocument load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(errc::parse_error, "cannot open graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph_text(buf.str());
}

inline json weight_to_json(const SemigroupWeight& w) { return json(canonical_key(w)); }

inline json graph_to_json(const GraphDocument& doc) {
  json j;
  if (doc.q) j["q"] = *doc.q;
  j["vertices"] = json::array();
  for (const auto& [id, w] : doc.graph.vertices())
    j["vertices"].push_back({{"id", id}, {"weight", weight_to_json(w)}});
  j["edges"] = json::array();
  for (const auto& [id, e] : doc.graph.edges()) {
    json je{{"id", id}, {"u", e.u}, {"v", e.v}};
    auto jit = doc.edge_j.find(id);
    if (jit != doc.edge_j.end()) {
      je["gamma"] = json{{"J", jit->second}};
    } else if (e.gamma.kind() == EdgeWeight::Kind::exact) {
      je["gamma"] = exact_entry_to_json(e.gamma.exact_value());
    } else if (e.gamma.kind() == EdgeWeight::Kind::symbolic) {
      je["gamma"] = "symbolic";
    }
    j["edges"].push_back(std::move(je));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Hamiltonian spec files
// ---------------------------------------------------------------------------

inline FieldFamily parse_family_name(const std::string& name) {
  if (name == "general") return FieldFamily::general;
  if (name == "zero") return FieldFamily::zero;
  if (name == "integer-scaled") return FieldFamily::integer_scaled;
  if (name == "constant") return FieldFamily::constant;
  if (name == "preferred") return FieldFamily::preferred;
  if (name == "r-field") return FieldFamily::r_field;
  if (name == "ising") return FieldFamily::ising;
  throw_error(errc::parse_error, "unknown family '" + name + "'");
}

inline std::vector<GaussianRational> parse_entry_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw_error(errc::parse_error, where + ": expected a nonempty array");
  std::vector<GaussianRational> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_exact_entry(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline HamiltonianSpec parse_spec_json(const json& doc) {
  if (!doc.is_object()) throw_error(errc::parse_error, "spec document must be a JSON object");
  if (!doc.contains("family") || !doc.at("family").is_string())
    throw_error(errc::parse_error, "missing \"family\" string");
  HamiltonianSpec spec;
  spec.family = parse_family_name(doc.at("family").get<std::string>());

  if (spec.family == FieldFamily::ising) {
    spec.q = 2;
    if (doc.contains("q") && doc.at("q").get<int>() != 2)
      throw_error(errc::spec_mismatch, "the ising family requires q = 2");
  } else {
    if (!doc.contains("q") || !doc.at("q").is_number_integer())
      throw_error(errc::parse_error, "missing integer \"q\"");
    spec.q = doc.at("q").get<int>();
    if (spec.q < 1) throw_error(errc::parse_error, "q must be at least 1");
  }

  if (!doc.contains("beta") || !doc.at("beta").is_number())
    throw_error(errc::parse_error, "missing numeric \"beta\"");
  spec.beta = doc.at("beta").get<double>();

  if (!doc.contains("J")) throw_error(errc::parse_error, "missing \"J\"");
  const json& jj = doc.at("J");
  if (jj.is_number()) {
    spec.j = Interactions::constant(jj.get<double>());
  } else if (jj.is_object()) {
    std::map<std::string, double> per;
    for (const auto& [id, v] : jj.items()) {
      if (!v.is_number()) throw_error(errc::parse_error, "J." + id + ": expected a number");
      per[id] = v.get<double>();
    }
    spec.j = Interactions::per_edge(std::move(per));
  } else {
    throw_error(errc::parse_error, "\"J\": expected a number or an object of edge values");
  }

  const json fields = doc.value("fields", json::object());
  switch (spec.family) {
    case FieldFamily::zero:
      break;
    case FieldFamily::general:
    case FieldFamily::r_field:
      for (const auto& [vid, vec] : fields.items())
        spec.vector_fields.emplace(vid, parse_entry_vector(vec, "fields." + vid));
      if (spec.family == FieldFamily::r_field) {
        if (!doc.contains("r") || !doc.at("r").is_number_integer())
          throw_error(errc::parse_error, "the r-field family needs an integer \"r\"");
        spec.r = doc.at("r").get<int>();
      }
      break;
    case FieldFamily::integer_scaled: {
      if (!fields.contains("B"))
        throw_error(errc::parse_error, "integer-scaled fields need \"B\"");
      spec.base_field = parse_entry_vector(fields.at("B"), "fields.B");
      if (!fields.contains("k") || !fields.at("k").is_object())
        throw_error(errc::parse_error, "integer-scaled fields need a \"k\" object");
      for (const auto& [vid, kv] : fields.at("k").items()) {
        if (!kv.is_number_integer())
          throw_error(errc::non_integer_multiplier,
                      "fields.k." + vid + ": multipliers must be integers");
        spec.multipliers.emplace(vid, BigInt(kv.get<long long>()));
      }
      break;
    }
    case FieldFamily::constant:
      if (!fields.contains("B"))
        throw_error(errc::parse_error, "constant fields need \"B\"");
      spec.base_field = parse_entry_vector(fields.at("B"), "fields.B");
      break;
    case FieldFamily::preferred:
    case FieldFamily::ising: {
      if (!fields.contains("z") || !fields.at("z").is_object())
        throw_error(errc::parse_error, "this family needs a \"z\" object in fields");
      for (const auto& [vid, zv] : fields.at("z").items()) {
        GaussianRational z = parse_exact_entry(zv, "fields.z." + vid);
        spec.scalar_fields.emplace(vid, std::move(z));
      }
      break;
    }
  }
  return spec;
}

inline HamiltonianSpec parse_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw_error(errc::parse_error, e.what());
  }
  return parse_spec_json(doc);
}

inline HamiltonianSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(errc::parse_error, "cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

inline json spec_to_json(const HamiltonianSpec& spec) {
  json j;
  j["family"] = field_family_name(spec.family);
  j["q"] = spec.q;
  j["beta"] = spec.beta;
  if (spec.j.is_constant()) {
    j["J"] = spec.j.constant_value();
  } else {
    json per = json::object();
    for (const auto& [id, v] : spec.j.per_edge_values()) per[id] = v;
    j["J"] = std::move(per);
  }
  switch (spec.family) {
    case FieldFamily::zero:
      break;
    case FieldFamily::general:
    case FieldFamily::r_field: {
      json f = json::object();
      for (const auto& [vid, vec] : spec.vector_fields) {
        json arr = json::array();
        for (const auto& e : vec) arr.push_back(exact_entry_to_json(e));
        f[vid] = std::move(arr);
      }
      j["fields"] = std::move(f);
      if (spec.family == FieldFamily::r_field) j["r"] = spec.r;
      break;
    }
    case FieldFamily::integer_scaled: {
      json b = json::array();
      for (const auto& e : spec.base_field) b.push_back(exact_entry_to_json(e));
      json k = json::object();
      for (const auto& [vid, kv] : spec.multipliers)
        k[vid] = static_cast<long long>(kv);
      j["fields"] = json{{"B", std::move(b)}, {"k", std::move(k)}};
      break;
    }
    case FieldFamily::constant: {
      json b = json::array();
      for (const auto& e : spec.base_field) b.push_back(exact_entry_to_json(e));
      j["fields"] = json{{"B", std::move(b)}};
      break;
    }
    case FieldFamily::preferred:
    case FieldFamily::ising: {
      json z = json::object();
      for (const auto& [vid, zv] : spec.scalar_fields) z[vid] = exact_entry_to_json(zv);
      j["fields"] = json{{"z", std::move(z)}};
      break;
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// polynomial term-list export
// ---------------------------------------------------------------------------

inline json polynomial_to_json(const SparsePolynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    json vars = json::object();
    for (const auto& [k, e] : m.factors()) vars[k.text()] = e;
    terms.push_back({{"coeff", gaussian_to_string(c)}, {"vars", std::move(vars)}});
  }
  return terms;
}

// ---------------------------------------------------------------------------
// numeric formatting (15 significant digits)
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string format_complex(const std::complex<double>& z) {
  if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z.real())))
    return format_double(z.real());
  return format_double(z.real()) + (z.imag() < 0 ? " - " : " + ") +
         format_double(std::abs(z.imag())) + "i";
}

inline json complex_to_json(const std::complex<double>& z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace vpoly
