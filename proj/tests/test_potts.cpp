#include "vpoly/potts.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "vpoly/suite.hpp"

using namespace vpoly;

namespace {

constexpr double kTol = 1e-9;

void expect_near(Complex a, Complex b, double tol = kTol) {
  EXPECT_TRUE(approx_equal(a, b, tol))
      << a.real() << (a.imag() < 0 ? "-" : "+") << std::abs(a.imag()) << "i vs " << b.real()
      << (b.imag() < 0 ? "-" : "+") << std::abs(b.imag()) << "i";
}

WeightedMultigraph pair_graph() {
  WeightedMultigraph g;
  g.add_vertex("v1", SemigroupWeight::integer(1));
  g.add_vertex("v2", SemigroupWeight::integer(1));
  g.add_edge("e1", "v1", "v2");
  return g;
}

WeightedMultigraph k3() {
  WeightedMultigraph g;
  for (int i = 1; i <= 3; ++i)
    g.add_vertex("v" + std::to_string(i), SemigroupWeight::integer(1));
  g.add_edge("e1", "v1", "v2");
  g.add_edge("e2", "v2", "v3");
  g.add_edge("e3", "v1", "v3");
  return g;
}

WeightedMultigraph e1() {
  WeightedMultigraph g;
  g.add_vertex("v1", SemigroupWeight::integer(1));
  return g;
}

GaussianRational rat(long long n, long long d = 1) { return GaussianRational(make_rational(n, d)); }

}  // namespace

TEST(Potts, HamiltonianZeroFieldAllEqual) {
  auto spec = HamiltonianSpec::zero_field(3, 1.0, Interactions::constant(1.5));
  SpinState s{{{"v1", 2}, {"v2", 2}, {"v3", 2}}};
  expect_near(hamiltonian_value(spec, k3(), s), Complex(-1.5 * 3));
}

TEST(Potts, HamiltonianGeneralSingleVertex) {
  auto spec = HamiltonianSpec::general(3, 1.0, Interactions::constant(0.0),
                                       {{"v1", {rat(1, 2), rat(-2), rat(0)}}});
  expect_near(hamiltonian_value(spec, e1(), SpinState{{{"v1", 1}}}), Complex(-0.5));
  expect_near(hamiltonian_value(spec, e1(), SpinState{{{"v1", 2}}}), Complex(2.0));
}

TEST(Potts, HamiltonianIsingAntiparallel) {
  auto spec = HamiltonianSpec::ising(1.0, Interactions::constant(1.25),
                                     {{"v1", rat(0)}, {"v2", rat(0)}});
  SpinState s{{{"v1", +1}, {"v2", -1}}};
  expect_near(hamiltonian_value(spec, pair_graph(), s), Complex(+1.25));
}

TEST(Potts, HamiltonianRejectsBadSpins) {
  auto spec = HamiltonianSpec::zero_field(2, 1.0, Interactions::constant(1.0));
  EXPECT_THROW(hamiltonian_value(spec, pair_graph(), SpinState{{{"v1", 3}, {"v2", 1}}}), error);
  auto ispec = HamiltonianSpec::ising(1.0, Interactions::constant(1.0),
                                      {{"v1", rat(0)}, {"v2", rat(0)}});
  EXPECT_THROW(hamiltonian_value(ispec, pair_graph(), SpinState{{{"v1", 1}, {"v2", 2}}}), error);
}

TEST(Potts, BoltzmannNormalization) {
  auto spec = HamiltonianSpec::general(
      2, 0.5, Interactions::per_edge({{"e1", 0.75}}),
      {{"v1", {rat(1, 2), rat(-1)}}, {"v2", {rat(0), rat(2)}}});
  double total = 0.0;
  for (const auto& s : enumerate_states(spec, pair_graph()))
    total += boltzmann_probability(spec, pair_graph(), s);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Potts, BoltzmannUniformAtZeroField) {
  auto spec = HamiltonianSpec::zero_field(3, 1.0, Interactions::constant(0.0));
  for (const auto& s : enumerate_states(spec, e1()))
    EXPECT_NEAR(boltzmann_probability(spec, e1(), s), 1.0 / 3.0, 1e-12);
}

TEST(Potts, BoltzmannTwoState) {
  // single vertex, q=2, M=(m,0): Pr(spin 1) = e^{beta m} / (e^{beta m} + 1)
  const double beta = 0.8, m = 1.5;
  auto spec = HamiltonianSpec::general(2, beta, Interactions::constant(0.0),
                                       {{"v1", {rat(3, 2), rat(0)}}});
  EXPECT_NEAR(boltzmann_probability(spec, e1(), SpinState{{{"v1", 1}}}),
              std::exp(beta * m) / (std::exp(beta * m) + 1.0), 1e-12);
}

TEST(Potts, BruteforceSingleVertexField) {
  // Z(E_1) = sum_a e^{beta M_a}
  const double beta = 0.9;
  auto spec = HamiltonianSpec::general(3, beta, Interactions::constant(0.0),
                                       {{"v1", {rat(1), rat(-1, 2), rat(0)}}});
  expect_near(partition_bruteforce(spec, e1()),
              std::exp(beta) + std::exp(-0.5 * beta) + 1.0);
}

TEST(Potts, BruteforceSingleEdgeZeroField) {
  const double beta = 0.6, j = 1.1;
  auto spec = HamiltonianSpec::zero_field(2, beta, Interactions::constant(j));
  expect_near(partition_bruteforce(spec, pair_graph()), 2.0 * std::exp(beta * j) + 2.0);
}

TEST(Potts, BruteforceZeroCouplingIsQPowV) {
  auto spec = HamiltonianSpec::zero_field(3, 1.0, Interactions::constant(0.0));
  expect_near(partition_bruteforce(spec, k3()), Complex(27.0));
}

TEST(Potts, StateCap) {
  auto spec = HamiltonianSpec::zero_field(2, 1.0, Interactions::constant(1.0));
  PottsOptions tight;
  tight.max_states = 4;
  try {
    partition_bruteforce(spec, k3(), tight);
    FAIL() << "expected TooLarge";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::too_large);
  }
}

TEST(Potts, DeletionContractionMatchesBruteforce) {
  const double beta = 0.5;
  auto spec = HamiltonianSpec::general(
      2, beta, Interactions::per_edge({{"e1", 0.7}}),
      {{"v1", {rat(1, 2), rat(0)}}, {"v2", {rat(-1, 4), rat(1)}}});
  auto g = pair_graph();
  expect_near(partition_deletion_contraction(spec, g), partition_bruteforce(spec, g));
}

TEST(Potts, DeletionContractionStepIsLiteral) {
  // one recursion step by hand: Z(G) = Z(E_2) + (e^{beta J} - 1) Z(E_1, M_a + M_b)
  const double beta = 0.5, j = 0.7;
  auto g = pair_graph();
  std::vector<GaussianRational> ma{rat(1, 2), rat(-1)}, mb{rat(1, 4), rat(1)};
  auto spec = HamiltonianSpec::general(2, beta, Interactions::constant(j),
                                       {{"v1", ma}, {"v2", mb}});
  Complex z_e2 = x_value(ma, beta) * x_value(mb, beta);
  Complex z_merged = x_value({ma[0] + mb[0], ma[1] + mb[1]}, beta);
  Complex expected = z_e2 + (std::exp(beta * j) - 1.0) * z_merged;
  expect_near(partition_deletion_contraction(spec, g), expected);
  expect_near(partition_bruteforce(spec, g), expected);
}

TEST(Potts, DeletionContractionLoopRule) {
  // Z = e^{beta J} Z(E_1) for a single loop
  const double beta = 0.5, j = -0.8;
  WeightedMultigraph g;
  g.add_vertex("v1", SemigroupWeight::integer(1));
  g.add_edge("e1", "v1", "v1");
  auto spec = HamiltonianSpec::general(2, beta, Interactions::constant(j),
                                       {{"v1", {rat(1, 3), rat(0)}}});
  Complex x = std::exp(beta / 3.0) + 1.0;
  expect_near(partition_deletion_contraction(spec, g), std::exp(beta * j) * x);
  expect_near(partition_bruteforce(spec, g), std::exp(beta * j) * x);
}

TEST(Potts, ViaVSingleEdgeZeroVectors) {
  // M_a = M_b = 0, q = 2: V = x0^2 + gamma x0 evaluates to 4 + 2(e^{bJ}-1)
  const double beta = 0.75, j = 0.4;
  auto spec = HamiltonianSpec::general(
      2, beta, Interactions::constant(j),
      {{"v1", {rat(0), rat(0)}}, {"v2", {rat(0), rat(0)}}});
  auto res = partition_via_v(spec, pair_graph());
  expect_near(res.value, 2.0 * std::exp(beta * j) + 2.0);
  EXPECT_EQ(res.v.term_count(), 2u);
}

TEST(Potts, ViaVPreferredSpinX) {
  // E_1 with M = (m, 0, ..., 0): X_M = e^{beta m} + q - 1
  const double beta = 1.0;
  auto spec = HamiltonianSpec::general(4, beta, Interactions::constant(0.0),
                                       {{"v1", {rat(2), rat(0), rat(0), rat(0)}}});
  expect_near(partition_via_v(spec, e1()).value, std::exp(2.0 * beta) + 3.0);
}

TEST(Potts, ViaVTriangleZeroFieldIsMultivariateTutte) {
  const double beta = 0.5, j = 1.0;
  auto spec = HamiltonianSpec::zero_field(3, beta, Interactions::constant(j));
  const double q = 3.0, v = std::exp(beta * j) - 1.0;
  Complex zt = q * q * q + 3 * q * q * v + 3 * q * v * v + q * v * v * v;
  expect_near(partition_via_v(spec, k3()).value, zt);
  expect_near(partition_bruteforce(spec, k3()), zt);
}

TEST(Potts, ViaVNumericMode) {
  // complex double fields flow through the numeric path only
  auto spec = HamiltonianSpec::general_numeric(
      2, 0.5, Interactions::constant(0.3),
      {{"v1", {Complex(0.25, 0.5), Complex(-1.0, 0.0)}},
       {"v2", {Complex(0.0, -0.75), Complex(0.5, 0.25)}}});
  auto g = pair_graph();
  expect_near(partition_via_v(spec, g, /*symbolic=*/false).value,
              partition_bruteforce(spec, g));
  try {
    partition_via_v(spec, g, /*symbolic=*/true);
    FAIL() << "expected InexactField";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::inexact_field);
  }
}

TEST(Potts, FKSingleEdgeStructure) {
  const double beta = 0.5;
  auto spec = HamiltonianSpec::general(
      2, beta, Interactions::per_edge({{"e1", 1.2}}),
      {{"v1", {rat(1, 2), rat(0)}}, {"v2", {rat(1), rat(-1)}}});
  auto fk = fk_expansion(spec, pair_graph());
  ASSERT_EQ(fk.terms.size(), 2u);  // subsets {} and {e1}
  EXPECT_TRUE(fk.terms[0].subset.empty());
  EXPECT_EQ(fk.terms[0].component_weights.size(), 2u);
  EXPECT_EQ(fk.terms[1].subset, std::vector<std::string>{"e1"});
  ASSERT_EQ(fk.terms[1].component_weights.size(), 1u);
  // merged component weight is the vector sum
  EXPECT_EQ(fk.terms[1].component_weights[0],
            canonical_key(SemigroupWeight::gaussian_vector({rat(3, 2), rat(-1)})));
  expect_near(fk.total, partition_bruteforce(spec, pair_graph()));
}

TEST(Potts, FKZeroFieldIsRandomCluster) {
  // zero field: term value is q^{k(A)} prod (e^{beta J_e} - 1)
  const double beta = 1.0, j = 0.8;
  auto spec = HamiltonianSpec::zero_field(2, beta, Interactions::constant(j));
  auto fk = fk_expansion(spec, k3());
  const double v = std::exp(beta * j) - 1.0;
  for (const auto& term : fk.terms) {
    auto rep = k3().components(term.subset);
    Complex expected = std::pow(2.0, rep.k) * std::pow(v, term.subset.size());
    expect_near(term.value, expected);
  }
  expect_near(fk.total, partition_bruteforce(spec, k3()));
}

TEST(Potts, FKPreferredSingleVertex) {
  const double beta = 0.5;
  auto spec = HamiltonianSpec::preferred_spin(3, beta, Interactions::constant(0.0),
                                              {{"v1", rat(4, 5)}});
  auto fk = fk_expansion(spec, e1());
  ASSERT_EQ(fk.terms.size(), 1u);
  expect_near(fk.terms[0].value, std::exp(beta * 0.8) + 2.0);  // X_z = e^{beta z} + q - 1
}

TEST(Potts, ReduceToWMatchesBruteforce) {
  const double beta = 0.5, j = 0.9;
  auto spec = HamiltonianSpec::integer_scaled(2, beta, j, {rat(4, 5), rat(0)},
                                              {{"v1", BigInt(1)}, {"v2", BigInt(2)}});
  auto red = reduce_to_w(spec, pair_graph());
  expect_near(red.value, partition_bruteforce(spec, pair_graph()));
  expect_near(red.y_value, std::exp(beta * j));
}

TEST(Potts, ReduceToWUnitMultipliersIsConstantField) {
  const double beta = 1.0, j = 0.6;
  auto scaled = HamiltonianSpec::integer_scaled(3, beta, j, {rat(1, 2), rat(-1), rat(0)},
                                                {{"v1", BigInt(1)}, {"v2", BigInt(1)},
                                                 {"v3", BigInt(1)}});
  auto constant = HamiltonianSpec::constant_field(3, beta, j, {rat(1, 2), rat(-1), rat(0)});
  auto g = k3();
  expect_near(reduce_to_w(scaled, g).value, partition_bruteforce(constant, g));
}

TEST(Potts, ReduceToWZeroBaseCollapsesToZeroField) {
  const double beta = 0.5, j = 1.2;
  auto spec = HamiltonianSpec::integer_scaled(2, beta, j, {rat(0), rat(0)},
                                              {{"v1", BigInt(2)}, {"v2", BigInt(3)}});
  auto zero = HamiltonianSpec::zero_field(2, beta, Interactions::constant(j));
  expect_near(reduce_to_w(spec, pair_graph()).value,
              partition_bruteforce(zero, pair_graph()));
}

TEST(Potts, ReduceToWErrors) {
  auto bad_j = HamiltonianSpec::preferred_spin(2, 1.0, Interactions::constant(1.0),
                                               {{"v1", rat(1)}});
  EXPECT_THROW(reduce_to_w(bad_j, e1()), error);
  auto nonpos = HamiltonianSpec::integer_scaled(2, 1.0, 1.0, {rat(1), rat(0)},
                                                {{"v1", BigInt(0)}});
  try {
    reduce_to_w(nonpos, e1());
    FAIL() << "expected NonPositiveWeight";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::non_positive_weight);
  }
  auto degenerate = HamiltonianSpec::integer_scaled(2, 1.0, 0.0, {rat(1), rat(0)},
                                                    {{"v1", BigInt(1)}});
  try {
    reduce_to_w(degenerate, e1());
    FAIL() << "expected DegenerateTransform";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::degenerate_transform);
  }
}

TEST(Potts, ClassicalK3) {
  const double beta = 1.0, j = std::log(2.0);  // v = e^{beta J} - 1 = 1
  auto res = classical_zero_field(k3(), 2, beta, Interactions::constant(j));
  // Z_T(K3; 2, 1) = 8 + 12 + 6 + 2 = 28
  expect_near(res.zt, Complex(28.0));
  ASSERT_TRUE(res.tutte_route.has_value());
  expect_near(*res.tutte_route, Complex(28.0));
  auto spec = HamiltonianSpec::zero_field(2, beta, Interactions::constant(j));
  expect_near(partition_bruteforce(spec, k3()), Complex(28.0));
}

TEST(Potts, ClassicalBridge) {
  // single bridge: Z_T = q (q + v)
  const double beta = 0.5, j = 0.7;
  const double q = 2.0, v = std::exp(beta * j) - 1.0;
  auto res = classical_zero_field(pair_graph(), 2, beta, Interactions::constant(j));
  expect_near(res.zt, Complex(q * (q + v)));
  ASSERT_TRUE(res.tutte_route.has_value());
  expect_near(*res.tutte_route, Complex(q * (q + v)));
  auto spec = HamiltonianSpec::zero_field(2, beta, Interactions::constant(j));
  expect_near(partition_bruteforce(spec, pair_graph()), res.zt);
}

TEST(Potts, ClassicalEdgeless) {
  WeightedMultigraph g;
  for (int i = 0; i < 4; ++i)
    g.add_vertex("v" + std::to_string(i), SemigroupWeight::integer(1));
  auto res = classical_zero_field(g, 5, 1.0, Interactions::constant(0.7));
  expect_near(res.zt, Complex(625.0));
}

TEST(Potts, ClassicalExactIdentity) {
  auto [zt, route] = classical_zero_field_exact(k3(), Rational(3), make_rational(1, 2));
  EXPECT_EQ(zt, route);
  // Z_T(K3; q, v) = q^3 + 3 q^2 v + 3 q v^2 + q v^3
  Rational q(3), v = make_rational(1, 2);
  Rational expected = q * q * q + 3 * q * q * v + 3 * q * v * v + q * v * v * v;
  EXPECT_EQ(zt, GaussianRational(expected));
}

TEST(Potts, PreferredSpinExamples) {
  const double beta = 0.5;
  auto single = HamiltonianSpec::preferred_spin(4, beta, Interactions::constant(0.0),
                                                {{"v1", rat(3, 2)}});
  expect_near(preferred_spin_reduction(single, e1()), std::exp(beta * 1.5) + 3.0);

  // single edge: X_{z1} X_{z2} + (e^{beta J} - 1) X_{z1+z2} at q = 3
  const double j = 0.9;
  auto spec = HamiltonianSpec::preferred_spin(3, beta, Interactions::constant(j),
                                              {{"v1", rat(1, 2)}, {"v2", rat(-1, 3)}});
  auto xz = [&](double z) { return std::exp(beta * z) + 2.0; };
  Complex expected =
      xz(0.5) * xz(-1.0 / 3.0) + (std::exp(beta * j) - 1.0) * xz(0.5 - 1.0 / 3.0);
  expect_near(preferred_spin_reduction(spec, pair_graph()), expected);
  expect_near(partition_bruteforce(spec, pair_graph()), expected);

  // all z = 0 reduces to the zero-field value
  auto zs0 = HamiltonianSpec::preferred_spin(3, beta, Interactions::constant(j),
                                             {{"v1", rat(0)}, {"v2", rat(0)}});
  auto zero = HamiltonianSpec::zero_field(3, beta, Interactions::constant(j));
  expect_near(preferred_spin_reduction(zs0, pair_graph()),
              partition_bruteforce(zero, pair_graph()));
}

TEST(Potts, RFieldConsistency) {
  const double beta = 0.5;
  WeightedMultigraph g = pair_graph();
  // r = q: same as the general case
  auto full = HamiltonianSpec::r_field_sokal(
      2, beta, Interactions::constant(0.4), 2,
      {{"v1", {rat(1, 2), rat(-1)}}, {"v2", {rat(0), rat(1, 4)}}});
  auto general = HamiltonianSpec::general(
      2, beta, Interactions::constant(0.4),
      {{"v1", {rat(1, 2), rat(-1)}}, {"v2", {rat(0), rat(1, 4)}}});
  expect_near(r_field_reduction(full, g), partition_via_v(general, g).value);

  // r = 1: same as preferred spin
  auto r1 = HamiltonianSpec::r_field_sokal(3, beta, Interactions::constant(0.4), 1,
                                           {{"v1", {rat(1, 2), rat(0), rat(0)}},
                                            {"v2", {rat(-1, 4), rat(0), rat(0)}}});
  auto pref = HamiltonianSpec::preferred_spin(3, beta, Interactions::constant(0.4),
                                              {{"v1", rat(1, 2)}, {"v2", rat(-1, 4)}});
  expect_near(r_field_reduction(r1, g), preferred_spin_reduction(pref, g));

  // r = 0: zero field
  auto r0 = HamiltonianSpec::r_field_sokal(3, beta, Interactions::constant(0.4), 0,
                                           {{"v1", {rat(0), rat(0), rat(0)}},
                                            {"v2", {rat(0), rat(0), rat(0)}}});
  auto zero = HamiltonianSpec::zero_field(3, beta, Interactions::constant(0.4));
  expect_near(r_field_reduction(r0, g), partition_bruteforce(zero, g));
}

TEST(Potts, RFieldTruncationViolation) {
  auto bad = HamiltonianSpec::r_field_sokal(3, 1.0, Interactions::constant(0.4), 1,
                                            {{"v1", {rat(1), rat(1), rat(0)}}});
  try {
    r_field_reduction(bad, e1());
    FAIL() << "expected TruncationViolation";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::truncation_violation);
  }
}

TEST(Potts, IsingSingleVertex) {
  const double beta = 0.7, z = 2.0 / 3.0;
  auto spec = HamiltonianSpec::ising(beta, Interactions::constant(0.0), {{"v1", rat(2, 3)}});
  auto res = ising_partition(spec, e1());
  expect_near(res.bruteforce, std::exp(beta * z) + std::exp(-beta * z));
  expect_near(res.via_v, res.bruteforce);
  // the prefactor route written out: e^{-3 beta z} (e^{2 beta z} + e^{4 beta z})
  expect_near(std::exp(-3.0 * beta * z) *
                  (std::exp(2.0 * beta * z) + std::exp(4.0 * beta * z)),
              res.bruteforce);
}

TEST(Potts, IsingSingleEdgeZeroField) {
  const double beta = 0.45, j = 1.3;
  auto spec = HamiltonianSpec::ising(beta, Interactions::constant(j),
                                     {{"v1", rat(0)}, {"v2", rat(0)}});
  auto res = ising_partition(spec, pair_graph());
  expect_near(res.bruteforce, 2.0 * std::exp(beta * j) + 2.0 * std::exp(-beta * j));
  expect_near(res.via_v, res.bruteforce);
}

TEST(Potts, IsingSpinGlassCorollary) {
  const double beta = 0.5;
  auto js = Interactions::per_edge({{"e1", 0.8}, {"e2", -0.6}, {"e3", 1.1}});
  std::map<std::string, GaussianRational> zs{
      {"v1", rat(0)}, {"v2", rat(0)}, {"v3", rat(0)}};
  auto spec = HamiltonianSpec::ising(beta, js, zs);
  auto res = ising_partition(spec, k3());
  expect_near(spin_glass_value(k3(), beta, js), res.bruteforce);
  expect_near(res.via_v, res.bruteforce);
}

TEST(Potts, RFIMWrapper) {
  const double beta = 0.6, j = 0.9;
  std::map<std::string, GaussianRational> zs{{"v1", rat(1, 2)}, {"v2", rat(-1, 4)},
                                             {"v3", rat(1)}};
  auto res = rfim_partition(k3(), beta, j, zs);
  expect_near(res.via_v, res.bruteforce);
  EXPECT_TRUE(res.consistent(kTol));
}

TEST(Potts, IsingRequiresQ2) {
  auto spec = HamiltonianSpec::ising(1.0, Interactions::constant(1.0), {{"v1", rat(0)}});
  auto hacked = spec;
  hacked.q = 3;
  try {
    ising_partition(hacked, e1());
    FAIL() << "expected SpecMismatch";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::spec_mismatch);
  }
}

TEST(Potts, RangeGuard) {
  auto spec = HamiltonianSpec::general(2, 1.0, Interactions::constant(0.0),
                                       {{"v1", {rat(800), rat(0)}}});
  for (auto compute : {+[](const HamiltonianSpec& s, const WeightedMultigraph& g) {
                         (void)partition_bruteforce(s, g);
                       },
                       +[](const HamiltonianSpec& s, const WeightedMultigraph& g) {
                         (void)partition_via_v(s, g);
                       }}) {
    try {
      compute(spec, e1());
      FAIL() << "expected RangeWarning";
    } catch (const error& e) {
      EXPECT_EQ(e.code(), errc::range_warning);
    }
  }
}

TEST(Potts, OracleTriangleRandomInstances) {
  Rng rng(31);
  GraphGenOptions gopts;
  gopts.max_vertices = 5;
  gopts.max_edges = 7;
  for (int i = 0; i < 30; ++i) {
    auto inst = random_general_instance(rng, gopts);
    auto rep = oracle_triangle(inst.spec, inst.doc.graph);
    EXPECT_TRUE(rep.ok(kTol)) << "case " << i << ": max deviation "
                              << rep.max_relative_deviation;
  }
}

TEST(Potts, HierarchyEmbedsIntoGeneral) {
  // each family equals the general family with its embedded vectors
  const double beta = 0.5, j = 0.75;
  auto g = pair_graph();
  std::vector<HamiltonianSpec> specs{
      HamiltonianSpec::constant_field(3, beta, j, {rat(1, 2), rat(0), rat(-1)}),
      HamiltonianSpec::integer_scaled(3, beta, j, {rat(1, 2), rat(0), rat(-1)},
                                      {{"v1", BigInt(2)}, {"v2", BigInt(1)}}),
      HamiltonianSpec::preferred_spin(3, beta, Interactions::constant(j),
                                      {{"v1", rat(1, 2)}, {"v2", rat(-1, 3)}}),
      HamiltonianSpec::r_field_sokal(3, beta, Interactions::constant(j), 1,
                                     {{"v1", {rat(1, 2), rat(0), rat(0)}},
                                      {"v2", {rat(-1, 3), rat(0), rat(0)}}}),
  };
  for (const auto& spec : specs) {
    auto em = embed_general(spec, g);
    auto general = HamiltonianSpec::general(3, beta, spec.j, em.spec.vector_fields);
    expect_near(partition_bruteforce(spec, g), partition_bruteforce(general, g));
    expect_near(partition_via_v(spec, g).value, partition_bruteforce(general, g));
  }
}

TEST(Potts, PolynomialityCertificate) {
  // every x variable of the symbolic V lies in the subset-sum set
  Rng rng(32);
  for (int i = 0; i < 10; ++i) {
    auto inst = random_general_instance(rng);
    auto res = partition_via_v(inst.spec, inst.doc.graph);
    auto allowed = subset_sum_weight_keys(inst.spec.vector_fields, inst.spec.q);
    for (const auto& key : res.v.variables()) {
      if (key.kind != VariableKey::Kind::weight) continue;
      EXPECT_TRUE(allowed.count(key.name)) << key.name;
    }
  }
}

TEST(Potts, ComplexFieldsStayConsistent) {
  // Gaussian-rational fields with nonzero imaginary parts
  auto spec = HamiltonianSpec::general(
      2, 0.5, Interactions::per_edge({{"e1", 0.4}}),
      {{"v1", {GaussianRational(make_rational(1, 2), make_rational(1, 3)), rat(0)}},
       {"v2", {rat(-1), GaussianRational(make_rational(0, 1), make_rational(-1, 2))}}});
  auto g = pair_graph();
  auto rep = oracle_triangle(spec, g);
  EXPECT_TRUE(rep.ok(kTol)) << rep.max_relative_deviation;
}
