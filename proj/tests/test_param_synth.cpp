#include <doctest.h>

#include "heavy_anchor/game.hpp"
#include "heavy_anchor/graph.hpp"
#include "heavy_anchor/kernels.hpp"
#include "heavy_anchor/param_synth.hpp"
#include "oracles.hpp"

using namespace heavy_anchor;

namespace {

Matrix random_matrix(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
  auto g = SplitMix64::stream(seed, 1);
  Matrix A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) A(i, k) = scale * g.uniform(-1, 1);
  return A;
}

OperatorConstants sine_constants() {
  OperatorConstants c;
  c.mu = 1.0;
  c.lipschitz = 6.0;
  c.inv_lipschitz = 0.25;
  return c;
}

}  // namespace

TEST_SUITE("param_synth") {

TEST_CASE("eigenvalue map matches companion roots") {
  auto g = SplitMix64::stream(77, 0);
  for (int t = 0; t < 200; ++t) {
    const std::complex<double> rho(g.uniform(-5, 5), g.uniform(-5, 5));
    const double a = g.uniform(0.01, 3), b = g.uniform(0.01, 3);
    const auto [l1, l2] = eigenvalue_map(rho, a, b);
    const auto ref = oracle::quadratic_roots(a + b + rho, a * rho);
    CHECK(oracle::multiset_distance({l1, l2}, ref) < 1e-9 * (1 + std::abs(rho)));
  }
}

TEST_CASE("eigenvalue map reproduces the spectrum of the anchored system") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix A = random_matrix(4, s, 3.0);
    const double a = 0.3 + 0.1 * s, b = 1.1;
    const auto rho = oracle::eigenvalues(A);
    std::vector<std::complex<double>> mapped;
    for (const auto& r : rho) {
      const auto [l1, l2] = eigenvalue_map(r, a, b);
      mapped.push_back(l1);
      mapped.push_back(l2);
    }
    CHECK(oracle::multiset_distance(mapped, oracle::eigenvalues(anchor_system_matrix(A, a, b))) < 1e-9);
  }
}

TEST_CASE("Lyapunov solver agrees with the Kronecker solve") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Matrix M = random_matrix(6, 100 + s);
    M -= (oracle::spectral_abscissa(M) + 0.5) * Matrix::Identity(6, 6);
    const Matrix Q = Matrix::Identity(6, 6);
    const Matrix P = solve_lyapunov(M, Q);
    const Matrix ref = oracle::lyapunov_kron(M, Q);
    CHECK((P - ref).norm() <= 1e-9 * (1 + ref.norm()));
    CHECK((P * M + M.transpose() * P + Q).norm() <= 1e-9 * (1 + P.norm()));
    CHECK((P - P.transpose()).norm() == 0.0);
  }
}

TEST_CASE("Lyapunov solver rejects non-Hurwitz matrices") {
  Matrix M = Matrix::Identity(3, 3);
  M(0, 0) = -1;
  CHECK_THROWS_AS(solve_lyapunov(M, Matrix::Identity(3, 3)), InfeasibleError);
}

TEST_CASE("monotone game accepts any positive parameters") {
  const auto cert = synth_full_monotone();
  CHECK(cert.feasible);
  CHECK(accepts(cert, 1e-3, 1e3));
  CHECK(accepts(cert, 50.0, 0.01));
  CHECK_FALSE(accepts(cert, 0.0, 1.0));
}

TEST_CASE("stability intervals for the scaled fixtures") {
  const auto g1 = quadratic_stability_intervals(*build_benchmark("g1").quadratic(), 0.1);
  REQUIRE(g1.feasible);
  CHECK(g1.beta_range.lo == doctest::Approx(0.1));
  CHECK(g1.beta_range.hi == doctest::Approx(2.6));
  CHECK(g1.alpha_range(0.35).hi == doctest::Approx(0.540).epsilon(0.01));
  const auto g2 = quadratic_stability_intervals(*build_benchmark("g2").quadratic(), 0.1);
  CHECK(g2.beta_range.lo == doctest::Approx(0.1));
  CHECK(g2.beta_range.hi == doctest::Approx(13.0 / 45.0));
  CHECK(g2.alpha_range(107.0 / 900.0).hi == doctest::Approx(0.065).epsilon(0.01));
  const auto harmonic = quadratic_stability_intervals(*build_benchmark("harmonic").quadratic());
  CHECK(harmonic.feasible);
  CHECK_FALSE(harmonic.constrained);
}

TEST_CASE("property: case (iii) interval membership predicts Hurwitz blocks") {
  auto g = SplitMix64::stream(5, 0);
  int disagreements = 0, tested = 0;
  for (int t = 0; t < 300; ++t) {
    const double r = g.uniform(-2, -0.01), k = g.uniform(0.1, 6);
    Matrix A(2, 2);
    A << r, k, -k, r;
    const auto rep = quadratic_stability_intervals(A);
    const double beta = g.uniform(0.01, 6), alpha = g.uniform(0.001, 4);
    const bool predicted = rep.beta_range.contains(beta) && rep.alpha_range(beta).contains(alpha);
    const double abscissa = oracle::spectral_abscissa(anchor_system_matrix(A, alpha, beta));
    if (std::abs(abscissa) < 1e-9) continue;
    ++tested;
    if (predicted != (abscissa < 0)) ++disagreements;
  }
  CHECK(tested > 250);
  CHECK(disagreements == 0);
}

TEST_CASE("G1 and G3 general distributed certificates") {
  const CommGraph ring = CommGraph::ring(10);
  const auto c1 = exact_quadratic_constants(*build_benchmark("g1").quadratic());
  const auto g1 = synth_partial_general(c1, 10, ring);
  REQUIRE(g1.feasible);
  CHECK(g1.beta_range.lo == doctest::Approx(0.1));
  CHECK(g1.beta_range.hi == doctest::Approx(2.6));
  CHECK(g1.beta == doctest::Approx(0.35));
  CHECK(g1.alpha_range.hi == doctest::Approx(0.145).epsilon(0.02));
  CHECK(g1.alpha == doctest::Approx(0.072).epsilon(0.02));
  CHECK(*g1.c_min == doctest::Approx(1668).epsilon(0.02));
  const auto c3 = exact_quadratic_constants(*build_benchmark("g3").quadratic());
  const auto g3 = synth_partial_general(c3, 10, ring);
  REQUIRE(g3.feasible);
  CHECK(g3.beta_range.lo == doctest::Approx(0.2));
  CHECK(g3.beta_range.hi == doctest::Approx(1.3));
  CHECK(g3.alpha_range.hi == doctest::Approx(0.064).epsilon(0.02));
  CHECK(*g3.c_min == doctest::Approx(15057).epsilon(0.02));
}

TEST_CASE("G2 general distributed certificate is infeasible") {
  const auto c2 = exact_quadratic_constants(*build_benchmark("g2").quadratic());
  const auto cert = synth_partial_general(c2, 10, CommGraph::ring(10));
  CHECK_FALSE(cert.feasible);
  CHECK_FALSE(cert.reason.empty());
}

TEST_CASE("quadratic distributed certificates") {
  const CommGraph ring = CommGraph::ring(10);
  struct Row {
    const char* name;
    double beta, alpha, c_min;
  };
  for (const Row& row : {Row{"g1", 0.35, 0.270, 1517}, Row{"g2", 107.0 / 900, 0.032, 2.22e6},
                         Row{"g3", 0.44, 0.290, 7739}}) {
    const auto cert = synth_quadratic_partial(*build_benchmark(row.name).quadratic(), ring);
    REQUIRE(cert.feasible);
    CHECK(cert.beta == doctest::Approx(row.beta));
    CHECK(cert.alpha == doctest::Approx(row.alpha).epsilon(0.02));
    CHECK(*cert.c_min == doctest::Approx(row.c_min).epsilon(0.02));
    // P from the certificate solves the scaled Lyapunov equation
    const Matrix Mt = anchor_system_matrix(build_benchmark(row.name).quadratic()->A, cert.alpha, cert.beta, 0.1);
    const Matrix ref = oracle::lyapunov_kron(Mt, Matrix::Identity(Mt.rows(), Mt.cols()));
    CHECK((*cert.aux.P - ref).norm() <= 1e-8 * ref.norm());
  }
}

TEST_CASE("consensus gain bound recomputed from its ingredients") {
  const QuadraticGame qg = *build_benchmark("g1").quadratic();
  const auto cert = synth_quadratic_partial(qg, CommGraph::ring(10));
  const double p = oracle::largest_singular(*cert.aux.P);
  const double Lext = *cert.aux.L_ext;
  const double t = Lext * (p / std::sqrt(10.0) + 0.5);
  CHECK(*cert.c_min == doctest::Approx((Lext + t * t) / oracle::ring_lambda2(10)));
  CHECK(Lext == doctest::Approx(oracle::largest_singular(qg.A)));
}

TEST_CASE("Lyapunov norm is bounded below by N/(2 L_A + 4 alpha N)") {
  for (const char* name : {"g1", "g2", "g3"}) {
    const QuadraticGame qg = *build_benchmark(name).quadratic();
    const auto base = synth_quadratic_partial(qg, CommGraph::ring(10));
    const auto& st = *base.aux.stability;
    double v = 0.0;
    for (int i = 1; i < 2000 && v == 0.0; ++i) {
      const double t = st.beta_range.lo + (base.beta_range.hi - st.beta_range.lo) * i / 2000.0;
      if (st.alpha_range(t).contains(t)) v = t;
    }
    if (v == 0.0) continue;  // diagonal misses the stable region
    SynthOptions o;
    o.beta = v;
    o.alpha = v;
    const auto cert = synth_quadratic_partial(qg, CommGraph::ring(10), o);
    REQUIRE(cert.aux.p_simple_bound);
    CHECK(*cert.aux.p >= *cert.aux.p_simple_bound);
  }
}

TEST_CASE("general alpha bound formula") {
  const double d = 0.5, slack = 0.25, LJ = 1.2, kJ = 0.3;
  const double ref = 4 * d * (1 - d) * slack * (1 - kJ) / std::pow((1 - d) + d * (LJ + LJ * LJ), 2);
  CHECK(inverse_lipschitz_alpha_max(d, slack, LJ, kJ) == doctest::Approx(ref));
}

TEST_CASE("sine game general distributed certificate") {
  const auto cert = synth_partial_general(sine_constants(), 10, CommGraph::ring(10));
  REQUIRE(cert.feasible);
  CHECK(cert.beta_range.lo == doctest::Approx(0.1));
  CHECK(cert.beta_range.hi == doctest::Approx(1.6));
  CHECK(cert.beta == doctest::Approx(0.25));
  CHECK(cert.alpha == doctest::Approx(0.0478).epsilon(0.02));
  CHECK(*cert.c_min == doctest::Approx(3417).epsilon(0.02));
}

TEST_CASE("full-information hypomonotone certificate and its variants") {
  const auto single = synth_full_hypomonotone(sine_constants(), 10);
  REQUIRE(single.feasible);
  CHECK(single.beta_range.lo == doctest::Approx(1.0));
  CHECK(single.beta_range.hi == doctest::Approx(16.0));
  SynthOptions o;
  o.variant = FullInfoAlphaVariant::per_agent;
  const auto per = synth_full_hypomonotone(sine_constants(), 10, o);
  REQUIRE(per.feasible);
  CHECK(per.beta == doctest::Approx(single.beta));
  CHECK(per.alpha_range.hi > single.alpha_range.hi);
}

TEST_CASE("full-information quadratic certificate yields a Hurwitz system") {
  const QuadraticGame qg = *build_benchmark("g1").quadratic();
  const auto cert = synth_full_quadratic(qg);
  REQUIRE(cert.feasible);
  CHECK(oracle::spectral_abscissa(anchor_system_matrix(qg.A, cert.alpha, cert.beta)) < 0);
}

TEST_CASE("overrides outside the certified ranges need force") {
  const QuadraticGame qg = *build_benchmark("g1").quadratic();
  SynthOptions o;
  o.beta = 5.0;
  CHECK_THROWS_AS(synth_quadratic_partial(qg, CommGraph::ring(10), o), InputError);
  o.force = true;
  o.alpha = 0.1;
  const auto cert = synth_quadratic_partial(qg, CommGraph::ring(10), o);
  CHECK(cert.beta == 5.0);
  CHECK_FALSE(accepts(cert, cert.alpha, cert.beta));
  SynthOptions inside;
  inside.beta = 0.5;
  const auto ok = synth_quadratic_partial(qg, CommGraph::ring(10), inside);
  CHECK(ok.beta == 0.5);
  CHECK(accepts(ok, ok.alpha, ok.beta));
}

TEST_CASE("theorem tags round trip") {
  for (Theorem t : {Theorem::full_monotone, Theorem::full_hypomonotone, Theorem::full_quadratic,
                    Theorem::dist_general, Theorem::dist_quadratic}) {
    CHECK(theorem_from_string(to_string(t)) == t);
  }
  CHECK_THROWS_AS(theorem_from_string("thm9"), InputError);
}

}
