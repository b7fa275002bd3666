// vpoly: exact V-polynomials, Tutte-family specializations, and Potts
// partition functions for vertex- and edge-weighted multigraphs.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vpoly/engine.hpp"
#include "vpoly/io.hpp"
#include "vpoly/potts.hpp"
#include "vpoly/suite.hpp"

namespace {

using namespace vpoly;

struct CommonFlags {
  std::string format = "text";
  int max_edges = 24;
  std::uint64_t max_states = std::uint64_t(1) << 22;
  double tolerance = 1e-9;
  int threads = 1;
  std::string algorithm = "both";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--max-edges", f.max_edges,
                  "Edge cap for subset sums and the recursion (env VPOLY_MAX_EDGES)");
  cmd->add_option("--max-states", f.max_states, "State cap for brute-force enumeration");
  cmd->add_option("--tolerance", f.tolerance, "Relative tolerance for cross-checks");
  cmd->add_option("--threads", f.threads, "Worker threads for subset enumeration");
}

EngineOptions engine_options(const CommonFlags& f) {
  EngineOptions opts;
  opts.max_edges = f.max_edges;
  opts.threads = f.threads;
  return opts;
}

PottsOptions potts_options(const CommonFlags& f) {
  PottsOptions opts;
  opts.max_states = f.max_states;
  opts.engine = engine_options(f);
  opts.tolerance = f.tolerance;
  return opts;
}

void apply_env_caps(CommonFlags& f) {
  if (const char* cap = std::getenv("VPOLY_MAX_EDGES")) {
    try {
      f.max_edges = std::stoi(cap);
    } catch (const std::exception&) {
      throw_error(errc::parse_error, "VPOLY_MAX_EDGES is not an integer");
    }
  }
}

void print_polynomial(const SparsePolynomial& p, const std::string& format,
                      const std::string& name) {
  if (format == "json") {
    json out{{"polynomial", name}, {"text", p.to_text()}, {"terms", polynomial_to_json(p)}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << p.to_text() << "\n";
  }
}

int run_vpoly(const std::string& path, const CommonFlags& flags) {
  GraphDocument doc = load_graph_file(path);
  EngineOptions opts = engine_options(flags);
  SparsePolynomial result;
  if (flags.algorithm == "state-sum") {
    result = v_state_sum(doc.graph, opts);
  } else if (flags.algorithm == "deletion-contraction") {
    result = v_deletion_contraction(doc.graph, opts);
  } else {
    SparsePolynomial a = v_state_sum(doc.graph, opts);
    SparsePolynomial b = v_deletion_contraction(doc.graph, opts);
    if (a != b)
      throw_error(errc::verification_failure,
                  "state sum and deletion-contraction disagree on '" + path + "'");
    result = std::move(a);
  }
  print_polynomial(result, flags.format, "V");
  return 0;
}

int run_wpoly(const std::string& path, const CommonFlags& flags) {
  GraphDocument doc = load_graph_file(path);
  print_polynomial(w_polynomial(doc.graph, engine_options(flags)), flags.format, "W");
  return 0;
}

int run_upoly(const std::string& path, const CommonFlags& flags) {
  GraphDocument doc = load_graph_file(path);
  print_polynomial(u_polynomial(doc.graph, engine_options(flags)), flags.format, "U");
  return 0;
}

int run_tutte(const std::string& path, const CommonFlags& flags) {
  GraphDocument doc = load_graph_file(path);
  print_polynomial(tutte_polynomial(doc.graph, engine_options(flags)), flags.format, "T");
  return 0;
}

int run_zt(const std::string& path, const CommonFlags& flags) {
  GraphDocument doc = load_graph_file(path);
  print_polynomial(multivariate_tutte(doc.graph, engine_options(flags)), flags.format, "Z_T");
  return 0;
}

int run_potts(const std::string& spec_path, const std::string& graph_path,
              const CommonFlags& flags) {
  HamiltonianSpec spec = load_spec_file(spec_path);
  GraphDocument doc = load_graph_file(graph_path);
  PottsOptions opts = potts_options(flags);

  const bool run_brute = flags.algorithm == "state-sum" || flags.algorithm == "both";
  const bool run_dc = flags.algorithm == "deletion-contraction" || flags.algorithm == "both";

  json out;
  Complex z_brute, z_dc;
  if (run_brute) {
    z_brute = partition_bruteforce(spec, doc.graph, opts);
    out["state_sum"] = complex_to_json(z_brute);
  }
  if (run_dc) {
    z_dc = partition_deletion_contraction(spec, doc.graph, opts);
    out["deletion_contraction"] = complex_to_json(z_dc);
  }

  if (flags.format == "json") {
    std::cout << out.dump(2) << "\n";
  } else if (run_brute && run_dc) {
    std::cout << "Z (state sum)            = " << format_complex(z_brute) << "\n";
    std::cout << "Z (deletion-contraction) = " << format_complex(z_dc) << "\n";
  } else {
    std::cout << "Z = " << format_complex(run_brute ? z_brute : z_dc) << "\n";
  }

  if (run_brute && run_dc && !approx_equal(z_brute, z_dc, opts.tolerance))
    throw_error(errc::verification_failure,
                "state sum and deletion-contraction disagree beyond tolerance (" +
                    format_double(relative_deviation(z_brute, z_dc)) + ")");
  return 0;
}

int run_fk(const std::string& spec_path, const std::string& graph_path,
           const CommonFlags& flags) {
  HamiltonianSpec spec = load_spec_file(spec_path);
  GraphDocument doc = load_graph_file(graph_path);
  FKExpansion fk = fk_expansion(spec, doc.graph, potts_options(flags));

  if (flags.format == "json") {
    json terms = json::array();
    for (const auto& t : fk.terms) {
      terms.push_back({{"subset", t.subset},
                       {"components", t.component_weights},
                       {"x_product", complex_to_json(t.x_product)},
                       {"edge_factor", complex_to_json(t.edge_factor)},
                       {"value", complex_to_json(t.value)}});
    }
    json out{{"terms", std::move(terms)},
             {"prefactor", complex_to_json(fk.prefactor)},
             {"total", complex_to_json(fk.total)}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  for (const auto& t : fk.terms) {
    std::string subset = "{";
    for (std::size_t i = 0; i < t.subset.size(); ++i)
      subset += (i ? "," : "") + t.subset[i];
    subset += "}";
    std::string comps;
    for (std::size_t i = 0; i < t.component_weights.size(); ++i)
      comps += (i ? " " : "") + t.component_weights[i];
    std::cout << subset << "\tX: " << comps << "\tX-product: " << format_complex(t.x_product)
              << "\tedge factor: " << format_complex(t.edge_factor)
              << "\tterm: " << format_complex(t.value) << "\n";
  }
  if (std::abs(fk.prefactor - Complex(1.0)) > 0)
    std::cout << "prefactor: " << format_complex(fk.prefactor) << "\n";
  std::cout << "Z = " << format_complex(fk.total) << "\n";
  return 0;
}

int run_verify(const std::string& bundle_path, std::uint64_t seed, int cases,
               const CommonFlags& flags) {
  PottsOptions opts = potts_options(flags);
  VerifyResult res;
  if (!bundle_path.empty()) {
    InstanceBundle bundle = load_bundle_file(bundle_path);
    res = verify_instance(bundle.spec, bundle.doc, flags.tolerance, opts);
  } else {
    res = verify_random_suite(seed, cases, flags.tolerance, opts);
  }
  if (res.ok) {
    std::cout << "verify: " << res.message << "\n";
    return 0;
  }
  std::cout << "verify: FAILED: " << res.message << "\n";
  std::cout << res.counterexample.dump(2) << "\n";
  throw_error(errc::verification_failure, res.message);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact V-polynomial and Potts partition function toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string graph_path, spec_path, bundle_path;
  std::uint64_t seed = 42;
  int cases = 50;

  auto* c_vpoly = app.add_subcommand("vpoly", "V-polynomial of a weighted multigraph");
  c_vpoly->add_option("graph", graph_path, "Graph JSON file")->required();
  c_vpoly->add_option("--algorithm", flags.algorithm, "state-sum | deletion-contraction | both")
      ->check(CLI::IsMember({"state-sum", "deletion-contraction", "both"}));
  add_common(c_vpoly, flags);

  auto* c_wpoly = app.add_subcommand("wpoly", "W-polynomial (positive integer weights)");
  c_wpoly->add_option("graph", graph_path, "Graph JSON file")->required();
  add_common(c_wpoly, flags);

  auto* c_upoly = app.add_subcommand("upoly", "U-polynomial (weights forced to 1)");
  c_upoly->add_option("graph", graph_path, "Graph JSON file")->required();
  add_common(c_upoly, flags);

  auto* c_tutte = app.add_subcommand("tutte", "Classical Tutte polynomial T(G; x, y)");
  c_tutte->add_option("graph", graph_path, "Graph JSON file")->required();
  add_common(c_tutte, flags);

  auto* c_zt = app.add_subcommand("zt", "Multivariate Tutte polynomial Z_T(G; theta, gamma)");
  c_zt->add_option("graph", graph_path, "Graph JSON file")->required();
  add_common(c_zt, flags);

  auto* c_potts = app.add_subcommand("potts", "Potts partition function Z(G)");
  c_potts->add_option("spec", spec_path, "Hamiltonian spec JSON file")->required();
  c_potts->add_option("graph", graph_path, "Graph JSON file")->required();
  c_potts->add_option("--algorithm", flags.algorithm, "state-sum | deletion-contraction | both")
      ->check(CLI::IsMember({"state-sum", "deletion-contraction", "both"}));
  add_common(c_potts, flags);

  auto* c_fk = app.add_subcommand("fk", "Fortuin-Kasteleyn expansion of Z(G)");
  c_fk->add_option("spec", spec_path, "Hamiltonian spec JSON file")->required();
  c_fk->add_option("graph", graph_path, "Graph JSON file")->required();
  add_common(c_fk, flags);

  auto* c_verify = app.add_subcommand(
      "verify", "Cross-validate Z on an instance bundle or a seeded random suite");
  c_verify->add_option("bundle", bundle_path, "Instance bundle JSON ({spec, graph})");
  c_verify->add_option("--seed", seed, "Random suite seed");
  c_verify->add_option("--cases", cases, "Number of random cases");
  add_common(c_verify, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad invocation is a validation error
  }

  try {
    apply_env_caps(flags);
    if (c_vpoly->parsed()) return run_vpoly(graph_path, flags);
    if (c_wpoly->parsed()) return run_wpoly(graph_path, flags);
    if (c_upoly->parsed()) return run_upoly(graph_path, flags);
    if (c_tutte->parsed()) return run_tutte(graph_path, flags);
    if (c_zt->parsed()) return run_zt(graph_path, flags);
    if (c_potts->parsed()) return run_potts(spec_path, graph_path, flags);
    if (c_fk->parsed()) return run_fk(spec_path, graph_path, flags);
    if (c_verify->parsed()) return run_verify(bundle_path, seed, cases, flags);
  } catch (const vpoly::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
