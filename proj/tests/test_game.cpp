#include <doctest.h>

#include "heavy_anchor/game.hpp"
#include "heavy_anchor/kernels.hpp"
#include "oracles.hpp"

using namespace heavy_anchor;

namespace {

Vector random_vector(Eigen::Index n, std::uint64_t seed, double lo = -10, double hi = 10) {
  auto g = SplitMix64::stream(seed, 0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_SUITE("game_model") {

TEST_CASE("ring fixtures match the per-agent cost gradients") {
  for (const char* name : {"g1", "g2", "g3"}) {
    const Game g = build_benchmark(name);
    const auto w = benchmark_weights(name);
    REQUIRE(g.n_agents() == 10);
    REQUIRE(g.dim() == 20);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Vector x = random_vector(20, s);
      CHECK((g.pseudo_gradient(x) - oracle::ring_pseudo_gradient(w, x)).norm() < 1e-12);
    }
  }
}

TEST_CASE("harmonic game is the two-player bilinear zero-sum game") {
  const Game g = build_benchmark("harmonic");
  Vector x(2);
  x << 3.0, -2.0;
  // J1 = x1 x2, J2 = -x1 x2
  const Vector F = g.pseudo_gradient(x);
  CHECK(F[0] == doctest::Approx(-2.0));
  CHECK(F[1] == doctest::Approx(-3.0));
  CHECK(solve_quadratic_ne(*g.quadratic()).norm() == doctest::Approx(0.0));
}

TEST_CASE("sine game partial gradients") {
  const Game g = build_benchmark("sine");
  const auto w = benchmark_weights("sine");
  const Vector x = random_vector(20, 7, -3, 3);
  const Vector F = g.pseudo_gradient(x);
  for (int i = 0; i < 10; ++i) {
    const int p = 9 - i;
    const double wi = w[static_cast<std::size_t>(i)];
    CHECK(F[2 * i] == doctest::Approx(wi * (5 * x[2 * p] + std::sin(x[2 * p + 1]))));
    CHECK(F[2 * i + 1] == doctest::Approx(wi * (5 * x[2 * p + 1] - std::sin(x[2 * p]))));
  }
  CHECK(g.pseudo_gradient(Vector::Zero(20)).norm() == 0.0);
  CHECK(g.quadratic() == nullptr);
}

TEST_CASE("extended pseudo-gradient at consensus equals the pseudo-gradient") {
  for (const auto& name : benchmark_names()) {
    const Game g = build_benchmark(name);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Vector x = random_vector(g.dim(), 100 + s);
      const Vector bold = g.extended_pseudo_gradient(consensus_lift(g.n_agents(), x));
      CHECK((bold - g.pseudo_gradient(x)).norm() <= 1e-12 * (1 + x.norm()));
    }
  }
}

TEST_CASE("extended pseudo-gradient reads each agent's own estimate") {
  const Game g = build_benchmark("g1");
  const int N = g.n_agents();
  Vector stacked = random_vector(N * g.dim(), 3);
  const Vector out = g.extended_pseudo_gradient(stacked);
  for (int i = 0; i < N; ++i) {
    const Vector est = stacked.segment(i * g.dim(), g.dim());
    CHECK((out.segment(g.offset(i), 2) - g.pseudo_gradient(est).segment(g.offset(i), 2)).norm() < 1e-12);
  }
}

TEST_CASE("selection matrix") {
  const Selection sel({1, 2, 3});
  const Matrix R = sel.matrix();
  CHECK(R.rows() == 6);
  CHECK(R.cols() == 18);
  CHECK((R * R.transpose() - Matrix::Identity(6, 6)).norm() == 0.0);
  const Vector st = random_vector(18, 5);
  CHECK((sel.select(st) - R * st).norm() == 0.0);
  const Vector a = random_vector(6, 6);
  CHECK((sel.scatter(a) - R.transpose() * a).norm() == 0.0);
}

TEST_CASE("singular quadratic game reports the rank") {
  QuadraticGame qg;
  qg.A = Matrix::Zero(3, 3);
  qg.A(0, 0) = 1;
  qg.A(1, 1) = 2;
  qg.b = Vector::Zero(3);
  qg.dims = {1, 1, 1};
  try {
    solve_quadratic_ne(qg);
    FAIL("expected SingularSystemError");
  } catch (const SingularSystemError& e) {
    CHECK(e.rank() == 2);
    CHECK(e.dim() == 3);
  }
}

TEST_CASE("quadratic equilibrium solves A x + b = 0") {
  const Game g = build_benchmark("g3");
  QuadraticGame qg = *g.quadratic();
  qg.b = random_vector(20, 11);
  const Vector x = solve_quadratic_ne(qg);
  CHECK((qg.A * x + qg.b).norm() < 1e-10);
  CHECK((x - qg.A.fullPivLu().solve(-qg.b)).norm() < 1e-10);
}

TEST_CASE("invalid games are rejected") {
  QuadraticGame qg;
  qg.A = Matrix::Identity(3, 3);
  qg.b = Vector::Zero(3);
  qg.dims = {1, 1};
  CHECK_THROWS_AS(qg.validate(), InputError);
  qg.dims = {1, 2};
  CHECK_NOTHROW(qg.validate());
  qg.b = Vector::Zero(2);
  CHECK_THROWS_AS(qg.validate(), InputError);
  CHECK_THROWS_AS(build_benchmark("nope"), InputError);
  CHECK_THROWS_AS(Game("x", {}, nullptr), InputError);
}

TEST_CASE("plugin registry") {
  register_game("test-scalar", [] {
    QuadraticGame qg;
    qg.A = Matrix::Identity(1, 1);
    qg.b = Vector::Ones(1);
    qg.dims = {1};
    return Game::from_quadratic("test-scalar", qg);
  });
  const Game g = resolve_game("test-scalar");
  CHECK(g.name() == "test-scalar");
  CHECK(resolve_game("g2").name() == "g2");
  CHECK_THROWS_AS(resolve_game("missing"), InputError);
}

TEST_CASE("estimate state sizes") {
  const auto st = EstimateState::at_consensus(3, Vector::Ones(2), Vector::Zero(2));
  CHECK(st.x.size() == 6);
  CHECK_NOTHROW(st.validate(3, 2));
  CHECK_THROWS_AS(st.validate(2, 2), InputError);
}

}
