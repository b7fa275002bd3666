// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "vpoly/engine.hpp"
#include "vpoly/io.hpp"
#include "vpoly/potts.hpp"
#include "vpoly/suite.hpp"

using namespace vpoly;

namespace {

const std::string kFixtures = VPOLY_FIXTURE_DIR;
const std::string kCli = VPOLY_CLI_PATH;

void report(int criterion, const std::string& what, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << ": criterion " << criterion << ": " << what
            << std::endl;
  EXPECT_TRUE(ok) << "criterion " << criterion << ": " << what;
}

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  CliRun res;
  const std::string cmd = kCli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace

// 1. v_state_sum and v_deletion_contraction agree identically on 200 seeded
//    random weighted multigraphs (loops, parallel edges, integer-vector
//    weights, symbolic gamma). Exact polynomial equality.
TEST(Acceptance, C1_AlgorithmEquivalence) {
  Rng rng(1001);
  bool ok = true;
  for (int i = 0; i < 200 && ok; ++i) {
    auto g = random_integer_vector_graph(rng);
    ok = v_state_sum(g) == v_deletion_contraction(g);
    if (!ok) std::cout << "  first failure at case " << i << "\n";
  }
  report(1, "state sum == deletion-contraction on 200 random multigraphs (exact)", ok);
}

// 2. The recursion result is independent of the edge-selection order.
TEST(Acceptance, C2_OrderIndependence) {
  Rng rng(1001);  // same suite as criterion 1
  EngineOptions lo, hi;
  hi.order = EdgeOrder::highest_id_first;
  bool ok = true;
  for (int i = 0; i < 200 && ok; ++i) {
    auto g = random_integer_vector_graph(rng);
    ok = v_deletion_contraction(g, lo) == v_deletion_contraction(g, hi);
  }
  report(2, "two edge orderings give identical polynomials on 200 graphs (exact)", ok);
}

// 3. Brute-force Z, deletion-contraction Z, V-evaluation Z and the FK sum
//    agree pairwise within 1e-9 on 100 seeded general-field instances.
TEST(Acceptance, C3_OracleTriangle) {
  Rng rng(2026);
  GraphGenOptions gopts;
  gopts.max_vertices = 5;
  gopts.max_edges = 7;
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 100 && ok; ++i) {
    auto inst = random_general_instance(rng, gopts);
    auto rep = oracle_triangle(inst.spec, inst.doc.graph);
    worst = std::max(worst, rep.max_relative_deviation);
    ok = rep.ok(1e-9);
    if (!ok) std::cout << "  first failure at case " << i << "\n";
  }
  report(3, "oracle triangle on 100 instances, max pairwise deviation " +
                format_double(worst) + " <= 1e-9", ok);
}

// 4. Specialization tower: W-from-V equals the direct W state sum; x -> theta
//    turns V into Z_T and W into theta^{k} T(1+theta, y). Exact equality on
//    100 seeded graphs with <= 6 edges.
TEST(Acceptance, C4_SpecializationTower) {
  Rng rng(3003);
  GraphGenOptions gopts;
  gopts.max_edges = 6;
  const auto theta = SparsePolynomial::variable(symbol_theta());
  const auto one = SparsePolynomial::constant(GaussianRational(1));
  bool ok = true;
  for (int i = 0; i < 100 && ok; ++i) {
    auto g = random_positive_integer_graph(rng, gopts);
    auto w_direct = w_state_sum(g, SparsePolynomial::variable(symbol_y()));
    auto w_via_v = w_from_v(g, SparsePolynomial::variable(symbol_y()));
    ok = w_direct == w_via_v;
    if (ok) {
      auto v_theta =
          v_deletion_contraction(g).substituted_kind(VariableKey::Kind::weight, theta);
      ok = v_theta == multivariate_tutte_direct(g, theta);
    }
    if (ok) {
      auto w_theta = w_direct.substituted_kind(VariableKey::Kind::weight, theta);
      auto t = tutte_polynomial(g).substituted(symbol_x(), theta + one);
      ok = w_theta == theta.pow(static_cast<unsigned>(g.components_all().k)) * t;
    }
    if (!ok) std::cout << "  first failure at case " << i << "\n";
  }
  report(4, "W/Z_T/Tutte specialization tower exact on 100 graphs", ok);
}

// 5. Classical identity: Z_T(G; q, v) = q^k v^{|V|-k} T(G; (q+v)/v, v+1) at
//    rational v (exact, hence within 1e-12), and both equal brute-force Z at
//    v = e^{beta J} - 1 within 1e-9. K3 reference value pinned.
TEST(Acceptance, C5_ClassicalIdentity) {
  Rng rng(4004);
  GraphGenOptions gopts;
  gopts.max_edges = 6;
  gopts.connected = true;
  gopts.min_vertices = 2;
  bool ok = true;

  // pinned K3 reference: Z_T(K3; q, v) = q^3 + 3q^2 v + 3q v^2 + q v^3
  WeightedMultigraph k3;
  for (int i = 1; i <= 3; ++i)
    k3.add_vertex("v" + std::to_string(i), SemigroupWeight::integer(1));
  k3.add_edge("e1", "v1", "v2");
  k3.add_edge("e2", "v2", "v3");
  k3.add_edge("e3", "v1", "v3");
  for (int q : {2, 3, 5}) {
    const Rational v = make_rational(3, 7);
    auto [zt, route] = classical_zero_field_exact(k3, Rational(q), v);
    Rational qq(q);
    Rational expected = qq * qq * qq + 3 * qq * qq * v + 3 * qq * v * v + qq * v * v * v;
    ok = ok && zt == GaussianRational(expected) && zt == route;
  }

  std::vector<WeightedMultigraph> graphs{k3};
  for (int i = 0; i < 20; ++i) graphs.push_back(random_positive_integer_graph(rng, gopts));
  double worst = 0.0;
  for (const auto& g : graphs) {
    if (!ok) break;
    for (int q : {2, 3, 5}) {
      const Rational v = rng.rational(2, 5);
      if (v == 0) continue;
      auto [zt, route] = classical_zero_field_exact(g, Rational(q), v);
      ok = ok && zt == route;  // exact, so certainly within 1e-12

      const double beta = 0.5;
      double j = rational_to_double(rng.rational(2, 4));
      if (std::abs(j) < 1e-3) j = 1.0;
      auto res = classical_zero_field(g, q, beta, Interactions::constant(j));
      auto spec = HamiltonianSpec::zero_field(q, beta, Interactions::constant(j));
      Complex brute = partition_bruteforce(spec, g);
      worst = std::max({worst, relative_deviation(res.zt, brute)});
      if (res.tutte_route)
        worst = std::max(worst, relative_deviation(*res.tutte_route, brute));
      ok = ok && worst <= 1e-9;
    }
  }
  report(5, "classical zero-field identity: exact at rational v, deviation " +
                format_double(worst) + " <= 1e-9 against brute force", ok);
}

// 6. Hierarchy consistency on 50 seeded instances per relation.
TEST(Acceptance, C6_HierarchyConsistency) {
  Rng rng(5005);
  GraphGenOptions gopts;
  gopts.max_vertices = 4;
  gopts.max_edges = 5;
  bool ok = true;
  double worst = 0.0;
  auto track = [&](Complex a, Complex b) {
    worst = std::max(worst, relative_deviation(a, b));
    ok = ok && approx_equal(a, b, 1e-9);
  };
  for (int i = 0; i < 50 && ok; ++i) {
    auto g = random_structure(rng, gopts);
    const int q = rng.chance(50) ? 2 : 3;
    const double beta = rng.chance(50) ? 0.5 : 1.0;
    double j = rational_to_double(rng.rational(2, 4));
    if (std::abs(j) < 1e-3) j = 0.75;

    std::vector<GaussianRational> base;
    for (int a = 0; a < q; ++a) base.emplace_back(rng.rational(2, 4));

    // constant field == integer-scaled at k == 1
    std::map<std::string, BigInt> unit_ks;
    for (const auto& [id, w] : g.vertices()) unit_ks.emplace(id, BigInt(1));
    auto constant = HamiltonianSpec::constant_field(q, beta, j, base);
    auto scaled = HamiltonianSpec::integer_scaled(q, beta, j, base, unit_ks);
    track(partition_via_v(constant, g).value, reduce_to_w(scaled, g).value);
    track(partition_bruteforce(constant, g), partition_bruteforce(scaled, g));

    // preferred == r-field at r = 1
    std::map<std::string, GaussianRational> zs;
    std::map<std::string, std::vector<GaussianRational>> truncated;
    for (const auto& [id, w] : g.vertices()) {
      GaussianRational z(rng.rational(2, 4));
      std::vector<GaussianRational> m(static_cast<std::size_t>(q), GaussianRational(0));
      m[0] = z;
      zs.emplace(id, std::move(z));
      truncated.emplace(id, std::move(m));
    }
    auto pref = HamiltonianSpec::preferred_spin(q, beta, Interactions::constant(j), zs);
    auto r1 = HamiltonianSpec::r_field_sokal(q, beta, Interactions::constant(j), 1, truncated);
    track(preferred_spin_reduction(pref, g), r_field_reduction(r1, g));

    // r = 0 and B = 0 both collapse to the zero field value
    auto zero = HamiltonianSpec::zero_field(q, beta, Interactions::constant(j));
    Complex z_zero = partition_bruteforce(zero, g);
    std::map<std::string, std::vector<GaussianRational>> no_field;
    for (const auto& [id, w] : g.vertices())
      no_field.emplace(id,
                       std::vector<GaussianRational>(static_cast<std::size_t>(q),
                                                     GaussianRational(0)));
    auto r0 = HamiltonianSpec::r_field_sokal(q, beta, Interactions::constant(j), 0, no_field);
    track(r_field_reduction(r0, g), z_zero);
    std::vector<GaussianRational> zero_base(static_cast<std::size_t>(q), GaussianRational(0));
    std::map<std::string, BigInt> ks;
    for (const auto& [id, w] : g.vertices()) ks.emplace(id, BigInt(rng.range(1, 3)));
    auto b0 = HamiltonianSpec::integer_scaled(q, beta, j, zero_base, ks);
    track(reduce_to_w(b0, g).value, z_zero);

    // every family == general with the embedded vectors
    auto em = embed_general(pref, g);
    auto general = HamiltonianSpec::general(q, beta, Interactions::constant(j),
                                            em.spec.vector_fields);
    track(partition_bruteforce(pref, g), partition_bruteforce(general, g));
  }
  report(6, "hierarchy relations on 50 seeded instances, max deviation " +
                format_double(worst) + " <= 1e-9", ok);
}

// 7. Ising: 2^{|V|} tau-state brute force equals the prefactor-times-V
//    formula within 1e-9 on 50 instances (<= 10 vertices); z == 0 matches
//    the spin-glass corollary. This run uses beta != 1 throughout, so it
//    also certifies that the x_z substitution carries beta rather than the
//    beta-free form.
TEST(Acceptance, C7_IsingRfim) {
  Rng rng(6006);
  GraphGenOptions gopts;
  gopts.max_vertices = 10;
  gopts.max_edges = 12;
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 50 && ok; ++i) {
    auto g = random_structure(rng, gopts);
    const double beta = rng.chance(50) ? 0.5 : 0.8;
    std::map<std::string, double> js;
    for (const auto& [id, e] : g.edges()) js[id] = rational_to_double(rng.rational(2, 4));
    std::map<std::string, GaussianRational> zs;
    for (const auto& [id, w] : g.vertices()) zs.emplace(id, rng.rational(1, 4));
    auto spec = HamiltonianSpec::ising(beta, Interactions::per_edge(js), zs);
    auto res = ising_partition(spec, g);
    worst = std::max(worst, relative_deviation(res.bruteforce, res.via_v));
    ok = res.consistent(1e-9);
    if (!ok) {
      std::cout << "  first failure at case " << i << "\n";
      break;
    }
    // spin glass corollary at z == 0
    std::map<std::string, GaussianRational> zero_zs;
    for (const auto& [id, w] : g.vertices()) zero_zs.emplace(id, GaussianRational(0));
    auto glass = HamiltonianSpec::ising(beta, Interactions::per_edge(js), zero_zs);
    auto glass_res = ising_partition(glass, g);
    Complex corollary = spin_glass_value(g, beta, Interactions::per_edge(js));
    worst = std::max({worst, relative_deviation(glass_res.bruteforce, corollary)});
    ok = approx_equal(glass_res.bruteforce, corollary, 1e-9);
  }
  report(7, "ising brute force == prefactor * V (beta in x_z) on 50 instances, "
            "max deviation " + format_double(worst) + " <= 1e-9", ok);
}

// 8. Polynomiality certificate: every x variable of the symbolic V used in
//    the Z = V evaluation indexes into the epsilon-subset-sum set of the
//    input field vectors. Checked on the criterion-3 suite.
TEST(Acceptance, C8_PolynomialityCertificate) {
  Rng rng(2026);  // the criterion-3 suite
  GraphGenOptions gopts;
  gopts.max_vertices = 5;
  gopts.max_edges = 7;
  bool ok = true;
  for (int i = 0; i < 100 && ok; ++i) {
    auto inst = random_general_instance(rng, gopts);
    auto res = partition_via_v(inst.spec, inst.doc.graph);
    auto allowed = subset_sum_weight_keys(inst.spec.vector_fields, inst.spec.q);
    for (const auto& key : res.v.variables()) {
      if (key.kind != VariableKey::Kind::weight) continue;
      if (!allowed.count(key.name)) {
        std::cout << "  stray variable " << key.text() << " in case " << i << "\n";
        ok = false;
        break;
      }
    }
  }
  report(8, "all V variables lie in the subset-sum set on 100 instances", ok);
}

// 9. CLI contract: the seeded random suite exits 0; corrupting one edge
//    weight in a verify fixture exits 3 and prints a counterexample bundle.
//    Exit codes 1 (validation) and 2 (size cap) are pinned as well.
TEST(Acceptance, C9_CliContract) {
  bool ok = true;

  auto good = run_cli("verify --seed 42 --cases 50");
  if (good.exit_code != 0) {
    std::cout << "  verify suite exited " << good.exit_code << "\n" << good.output;
    ok = false;
  }

  auto fixture_ok = run_cli("verify " + kFixtures + "/verify-bundle-k3.json");
  if (fixture_ok.exit_code != 0) {
    std::cout << "  pristine fixture exited " << fixture_ok.exit_code << "\n";
    ok = false;
  }

  // corrupt one edge weight (its J annotation) in the fixture's graph
  json bundle;
  {
    std::ifstream in(kFixtures + "/verify-bundle-k3.json");
    in >> bundle;
  }
  bundle["graph"]["edges"][1]["gamma"]["J"] = 0.5;  // was -0.75
  const auto tmp = std::filesystem::temp_directory_path() / "vpoly-corrupt-bundle.json";
  {
    std::ofstream out(tmp);
    out << bundle.dump(2);
  }
  auto bad = run_cli("verify " + tmp.string());
  if (bad.exit_code != 3) {
    std::cout << "  corrupted fixture exited " << bad.exit_code << ", expected 3\n"
              << bad.output;
    ok = false;
  }
  if (bad.output.find("max_relative_deviation") == std::string::npos ||
      bad.output.find("\"graph\"") == std::string::npos ||
      bad.output.find("\"spec\"") == std::string::npos) {
    std::cout << "  counterexample bundle missing from output\n" << bad.output;
    ok = false;
  }
  std::filesystem::remove(tmp);

  // documented exit codes: 1 for validation, 2 for the size cap
  if (run_cli("vpoly " + kFixtures + "/no-such-file.json").exit_code != 1) ok = false;
  if (run_cli("vpoly " + kFixtures + "/triangle.json --max-edges 2").exit_code != 2) ok = false;
  // determinism of the verify suite output given a seed
  auto again = run_cli("verify --seed 42 --cases 50");
  if (again.output != good.output) ok = false;

  // pinned outputs
  auto single = run_cli("vpoly " + kFixtures + "/single-edge.json");
  if (single.output != "x[Z:1]*x[Z:2] + g[e1]*x[Z:3]\n") {
    std::cout << "  unexpected vpoly output: " << single.output;
    ok = false;
  }
  auto potts28 =
      run_cli("potts " + kFixtures + "/spec-zero-q2.json " + kFixtures + "/triangle.json");
  if (potts28.exit_code != 0 || potts28.output.find("= 28") == std::string::npos) {
    std::cout << "  unexpected potts output: " << potts28.output;
    ok = false;
  }

  report(9, "CLI verify/exit-code contract (0 on suite, 3 on corrupted fixture)", ok);
}
