#pragma once

#include <algorithm>
#include <complex>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vpoly/errors.hpp"
#include "vpoly/exact.hpp"
#include "vpoly/weights.hpp"

namespace vpoly {

/// Per-edge weight gamma_e: either the formal variable named after the edge
/// id, an exact Gaussian-rational value, or a plain complex double (the
/// latter only usable on numeric evaluation paths).
class EdgeWeight {
 public:
  enum class Kind : std::uint8_t { symbolic, exact, numeric };

  EdgeWeight() : kind_(Kind::symbolic) {}

  static EdgeWeight symbolic() { return EdgeWeight(); }
  static EdgeWeight exact(GaussianRational v) {
    EdgeWeight w;
    w.kind_ = Kind::exact;
    w.exact_ = std::move(v);
    return w;
  }
  static EdgeWeight numeric(std::complex<double> v) {
    EdgeWeight w;
    w.kind_ = Kind::numeric;
    w.numeric_ = v;
    return w;
  }

  Kind kind() const { return kind_; }
  bool is_symbolic() const { return kind_ == Kind::symbolic; }
  const GaussianRational& exact_value() const { return exact_; }
  std::complex<double> numeric_value() const {
    return kind_ == Kind::exact ? exact_.to_complex() : numeric_;
  }

  std::string encoding() const {
    switch (kind_) {
      case Kind::symbolic: return "sym";
      case Kind::exact: return gaussian_to_key_string(exact_);
      case Kind::numeric: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "num(%.17g,%.17g)", numeric_.real(), numeric_.imag());
        return buf;
      }
    }
    return "?";
  }

  friend bool operator==(const EdgeWeight& a, const EdgeWeight& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::symbolic: return true;
      case Kind::exact: return a.exact_ == b.exact_;
      case Kind::numeric: return a.numeric_ == b.numeric_;
    }
    return false;
  }

 private:
  Kind kind_;
  GaussianRational exact_;
  std::complex<double> numeric_{0.0, 0.0};
};

struct Edge {
  std::string u;
  std::string v;
  EdgeWeight gamma;

  bool is_loop() const { return u == v; }
};

/// Nullity / rank / components of one spanning subgraph (V, A), plus the
/// semigroup weight-sum of each component.
struct ComponentReport {
  struct Component {
    std::vector<std::string> members;  // sorted vertex ids
    SemigroupWeight weight_sum;
  };
  std::vector<Component> components;  // ordered by smallest member id
  int k = 0;  // component count
  int r = 0;  // rank |V| - k
  int n = 0;  // nullity |A| - r
};

/// Multigraph with loops and parallel edges, per-vertex semigroup weights
/// and per-edge weights. Value type: delete_edge / contract_edge return new
/// graphs, so recursion branches can share ancestors freely.
class WeightedMultigraph {
 public:
  WeightedMultigraph() = default;

  void add_vertex(const std::string& id, SemigroupWeight w) {
    if (vertices_.count(id))
      throw_error(errc::duplicate_id, "vertex '" + id + "' already exists");
    if (!vertices_.empty()) {
      const SemigroupWeight& first = vertices_.begin()->second;
      if (first.kind() != w.kind() || first.dimension() != w.dimension())
        throw_error(errc::mixed_weight_kinds,
                    "vertex '" + id + "' has weight kind " + weight_kind_name(w.kind()) +
                        " but the graph uses " + weight_kind_name(first.kind()));
    }
    vertices_.emplace(id, std::move(w));
  }

  void add_edge(const std::string& id, const std::string& u, const std::string& v,
                EdgeWeight gamma = EdgeWeight::symbolic()) {
    if (edges_.count(id)) throw_error(errc::duplicate_id, "edge '" + id + "' already exists");
    if (!vertices_.count(u))
      throw_error(errc::dangling_endpoint, "edge '" + id + "' references missing vertex '" + u + "'");
    if (!vertices_.count(v))
      throw_error(errc::dangling_endpoint, "edge '" + id + "' references missing vertex '" + v + "'");
    edges_.emplace(id, Edge{u, v, std::move(gamma)});
  }

  const std::map<std::string, SemigroupWeight>& vertices() const { return vertices_; }
  const std::map<std::string, Edge>& edges() const { return edges_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_vertex(const std::string& id) const { return vertices_.count(id) != 0; }
  bool has_edge(const std::string& id) const { return edges_.count(id) != 0; }

  const SemigroupWeight& weight(const std::string& vertex_id) const {
    auto it = vertices_.find(vertex_id);
    if (it == vertices_.end()) throw_error(errc::unknown_vertex, "no vertex '" + vertex_id + "'");
    return it->second;
  }

  const Edge& edge(const std::string& edge_id) const {
    auto it = edges_.find(edge_id);
    if (it == edges_.end()) throw_error(errc::unknown_edge, "no edge '" + edge_id + "'");
    return it->second;
  }

  bool is_loop(const std::string& edge_id) const { return edge(edge_id).is_loop(); }

  std::vector<std::string> edge_ids() const {
    std::vector<std::string> ids;
    ids.reserve(edges_.size());
    for (const auto& [id, e] : edges_) ids.push_back(id);
    return ids;
  }

  /// Edge removed, everything else (including isolated vertices) unchanged.
  WeightedMultigraph delete_edge(const std::string& edge_id) const {
    WeightedMultigraph g = *this;
    if (!g.edges_.erase(edge_id)) throw_error(errc::unknown_edge, "no edge '" + edge_id + "'");
    return g;
  }

  /// Endpoints merged into min(u, v); the merged vertex weight is the
  /// semigroup sum of the endpoint weights. Loops are not contracted.
  WeightedMultigraph contract_edge(const std::string& edge_id) const {
    const Edge& e = edge(edge_id);
    if (e.is_loop())
      throw_error(errc::loop_contraction, "cannot contract loop '" + edge_id + "'");
    const std::string keep = std::min(e.u, e.v);
    const std::string drop = std::max(e.u, e.v);

    WeightedMultigraph g;
    for (const auto& [id, w] : vertices_) {
      if (id == keep)
        g.vertices_.emplace(id, add(weight(e.u), weight(e.v)));
      else if (id != drop)
        g.vertices_.emplace(id, w);
    }
    for (const auto& [id, ed] : edges_) {
      if (id == edge_id) continue;
      Edge moved = ed;
      if (moved.u == drop) moved.u = keep;
      if (moved.v == drop) moved.v = keep;
      g.edges_.emplace(id, std::move(moved));
    }
    return g;
  }

  /// Components, rank and nullity of the spanning subgraph (V, A).
  ComponentReport components(const std::vector<std::string>& subset) const {
    // map vertex ids to dense indices (sorted order)
    std::map<std::string, int> index;
    std::vector<const std::string*> ids;
    ids.reserve(vertices_.size());
    for (const auto& [id, w] : vertices_) {
      index.emplace(id, static_cast<int>(ids.size()));
      ids.push_back(&id);
    }
    std::vector<int> parent(ids.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
      while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
      }
      return a;
    };
    for (const auto& eid : subset) {
      const Edge& e = edge(eid);
      int a = find(index.at(e.u)), b = find(index.at(e.v));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    std::map<int, std::vector<int>> groups;  // root -> members
    for (int i = 0; i < static_cast<int>(ids.size()); ++i) groups[find(i)].push_back(i);

    ComponentReport rep;
    for (const auto& [root, members] : groups) {
      ComponentReport::Component comp;
      comp.weight_sum = vertices_.at(*ids[members[0]]);
      comp.members.push_back(*ids[members[0]]);
      for (std::size_t i = 1; i < members.size(); ++i) {
        comp.weight_sum = add(comp.weight_sum, vertices_.at(*ids[members[i]]));
        comp.members.push_back(*ids[members[i]]);
      }
      rep.components.push_back(std::move(comp));
    }
    rep.k = static_cast<int>(rep.components.size());
    rep.r = static_cast<int>(vertices_.size()) - rep.k;
    rep.n = static_cast<int>(subset.size()) - rep.r;
    return rep;
  }

  ComponentReport components_all() const { return components(edge_ids()); }

  /// Deterministic serialization of the labeled graph; equal strings iff
  /// equal labeled graphs (endpoint order within an edge ignored).
  std::string canonical_encoding() const {
    std::string s = "V{";
    for (const auto& [id, w] : vertices_) {
      s += id;
      s += "=";
      s += canonical_key(w);
      s += ";";
    }
    s += "}E{";
    for (const auto& [id, e] : edges_) {
      s += id;
      s += "=";
      s += std::min(e.u, e.v);
      s += ",";
      s += std::max(e.u, e.v);
      s += ",";
      s += e.gamma.encoding();
      s += ";";
    }
    s += "}";
    return s;
  }

  /// Kind shared by all vertex weights (integer when the graph is empty).
  WeightKind weight_kind() const {
    return vertices_.empty() ? WeightKind::integer : vertices_.begin()->second.kind();
  }

  /// Sum of all vertex weights; graph must be nonempty.
  SemigroupWeight total_weight() const {
    if (vertices_.empty()) throw_error(errc::internal_check, "total_weight of empty graph");
    auto it = vertices_.begin();
    SemigroupWeight acc = it->second;
    for (++it; it != vertices_.end(); ++it) acc = add(acc, it->second);
    return acc;
  }

  /// Same structure with every vertex weight replaced (used by the U-polynomial
  /// and the Tutte tower, which ignore the input weights).
  WeightedMultigraph with_uniform_weight(const SemigroupWeight& w) const {
    WeightedMultigraph g;
    for (const auto& [id, old] : vertices_) g.vertices_.emplace(id, w);
    g.edges_ = edges_;
    return g;
  }

  WeightedMultigraph with_vertex_weights(const std::map<std::string, SemigroupWeight>& ws) const {
    WeightedMultigraph g;
    for (const auto& [id, old] : vertices_) {
      auto it = ws.find(id);
      if (it == ws.end()) throw_error(errc::unknown_vertex, "no weight supplied for '" + id + "'");
      g.add_vertex(id, it->second);
    }
    g.edges_ = edges_;
    return g;
  }

  /// Same structure with every edge weight reset to its formal variable.
  WeightedMultigraph with_symbolic_edges() const {
    WeightedMultigraph g;
    g.vertices_ = vertices_;
    for (const auto& [id, e] : edges_)
      g.edges_.emplace(id, Edge{e.u, e.v, EdgeWeight::symbolic()});
    return g;
  }

 private:
  std::map<std::string, SemigroupWeight> vertices_;
  std::map<std::string, Edge> edges_;
};

}  // namespace vpoly
