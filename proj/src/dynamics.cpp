#include "heavy_anchor/dynamics.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/SVD>

#include "heavy_anchor/game.hpp"
#include "heavy_anchor/graph.hpp"

namespace heavy_anchor {

namespace {

double lipschitz_of(const Game& game, const IntegratorOptions& opts) {
  if (opts.lipschitz) return *opts.lipschitz;
  if (const auto* q = game.quadratic()) {
    Eigen::JacobiSVD<Matrix> svd(q->A);
    return svd.singularValues()(0);
  }
  SamplingOptions so;
  so.pairs = 1000;
  return sampled_constants(pseudo_gradient_operator(game), game.dim(), so).lipschitz;
}

struct Schedule {
  double h;
  std::uint64_t steps;
  std::uint64_t decimation;
};

Schedule make_schedule(double h_default, const IntegratorOptions& opts) {
  if (!(opts.T > 0.0)) throw InputError("horizon T must be positive");
  double h = opts.h ? *opts.h : h_default;
  if (!(h > 0.0)) throw InputError("step h must be positive");
  double T = opts.T;
  if (opts.max_steps) T = std::min(T, static_cast<double>(*opts.max_steps) * h);
  auto steps = static_cast<std::uint64_t>(std::ceil(T / h - 1e-9));
  if (steps == 0) steps = 1;
  h = T / static_cast<double>(steps);
  std::uint64_t dec = opts.decimation;
  if (dec == 0) {
    const std::uint64_t m = std::max<std::uint64_t>(opts.max_samples, 1);
    dec = std::max<std::uint64_t>(1, (steps + m - 1) / m);
  }
  return {h, steps, dec};
}

// Classical RK4 on y' = f(y) with preallocated stages.
template <class Rhs, class Record>
void run_rk4(Vector& y, const Schedule& s, Rhs&& f, Record&& record, Trajectory& tr) {
  const Eigen::Index m = y.size();
  Vector k1(m), k2(m), k3(m), k4(m), tmp(m);
  const double h = s.h;
  record(0.0, y);
  for (std::uint64_t k = 1; k <= s.steps; ++k) {
    f(y, k1);
    tmp = y + (0.5 * h) * k1;
    f(tmp, k2);
    tmp = y + (0.5 * h) * k2;
    f(tmp, k3);
    tmp = y + h * k3;
    f(tmp, k4);
    tmp = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = static_cast<double>(k) * h;
    if (!tmp.allFinite()) {
      tr.aborted = true;
      tr.abort_time = t;
      tr.abort_reason = "non-finite state";
      tr.steps = k - 1;
      return;
    }
    y.swap(tmp);
    if (k % s.decimation == 0 || k == s.steps) record(t, y);
  }
  tr.steps = s.steps;
}

void stamp(Trajectory& tr, const Schedule& s, const IntegratorOptions& opts) {
  tr.h = s.h;
  tr.decimation = s.decimation;
  tr.seed = opts.seed;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double default_step(double lipschitz, double beta, double c_lambda_max,
                    const IntegratorOptions& opts) {
  const double stiff = lipschitz + beta + c_lambda_max;
  if (!(stiff > 0.0)) return opts.h_cap;
  return std::min(opts.h_cap, opts.stiffness_factor / stiff);
}

Vector random_initial_state(Eigen::Index size, std::uint64_t seed, double lo, double hi) {
  SplitMix64 rng(seed);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

Trajectory simulate_gradient_play(const Game& game, const Vector& x0,
                                  const IntegratorOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = game.dim();
  require_size(x0.size(), n, "initial state x0");
  const Schedule s = make_schedule(default_step(lipschitz_of(game, opts), 0.0, 0.0, opts), opts);
  Trajectory tr;
  tr.dynamics = "gradient";
  tr.dim = n;
  tr.n_agents = game.n_agents();
  stamp(tr, s, opts);

  Vector y = x0;
  Vector Fx(n);
  auto f = [&](const Vector& yy, Vector& dy) {
    game.pseudo_gradient_into(yy, dy);
    dy = -dy;
  };
  auto record = [&](double t, const Vector& yy) {
    game.pseudo_gradient_into(yy, Fx);
    tr.times.push_back(t);
    tr.x.push_back(yy);
    tr.diagnostics.push_back({t, Fx.norm(), 0.0, std::nullopt});
  };
  run_rk4(y, s, f, record, tr);
  tr.wall_time = elapsed(t0);
  return tr;
}

Trajectory simulate_heavy_anchor_full(const Game& game, const Vector& x0, const Vector& r0,
                                      double alpha, double beta, const IntegratorOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(alpha > 0.0 && beta > 0.0)) throw InputError("alpha and beta must be positive");
  const Eigen::Index n = game.dim();
  require_size(x0.size(), n, "initial state x0");
  require_size(r0.size(), n, "initial state r0");
  const Schedule s =
      make_schedule(default_step(lipschitz_of(game, opts), beta, 0.0, opts), opts);
  Trajectory tr;
  tr.dynamics = "anchor";
  tr.dim = n;
  tr.n_agents = game.n_agents();
  stamp(tr, s, opts);

  Vector y(2 * n);
  y << x0, r0;
  Vector Fx(n);
  auto f = [&](const Vector& yy, Vector& dy) {
    const auto x = yy.head(n);
    const auto r = yy.tail(n);
    game.pseudo_gradient_into(x, Fx);
    dy.head(n) = -Fx - beta * (x - r);
    dy.tail(n) = alpha * (x - r);
  };
  auto record = [&](double t, const Vector& yy) {
    game.pseudo_gradient_into(yy.head(n), Fx);
    tr.times.push_back(t);
    tr.x.push_back(yy.head(n));
    tr.r.push_back(yy.tail(n));
    tr.diagnostics.push_back({t, Fx.norm(), 0.0, std::nullopt});
  };
  run_rk4(y, s, f, record, tr);
  tr.wall_time = elapsed(t0);
  return tr;
}

Trajectory simulate_heavy_anchor_distributed(const Game& game, const CommGraph& g,
                                             const Vector& x0, const Vector& r0, double alpha,
                                             double beta, double c,
                                             const IntegratorOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(alpha > 0.0 && beta > 0.0 && c > 0.0)) {
    throw InputError("alpha, beta and c must be positive");
  }
  const int N = game.n_agents();
  if (g.size() != N) throw InputError("graph size must equal the number of agents");
  if (!g.connected()) lambda2(g);  // throws with the component list
  const Eigen::Index n = game.dim();
  const Eigen::Index m = n * N;
  require_size(x0.size(), m, "initial estimates x0");
  require_size(r0.size(), m, "initial estimates r0");

  const LiftedLaplacian lap(g, n);
  const double c_lmax = c * lambda_max(g);
  const Schedule s =
      make_schedule(default_step(lipschitz_of(game, opts), beta, c_lmax, opts), opts);
  Trajectory tr;
  tr.dynamics = "anchor-distributed";
  tr.dim = n;
  tr.n_agents = N;
  tr.distributed = true;
  stamp(tr, s, opts);

  const Selection sel(game.dims());
  Vector y(2 * m);
  y << x0, r0;
  Vector Fext(n), Lx(m), xa(n), Fa(n);
  auto f = [&](const Vector& yy, Vector& dy) {
    const auto x = yy.head(m);
    const auto r = yy.tail(m);
    kernels::extended_pseudo_gradient(game, x, Fext, opts.exec);
    kernels::lifted_laplacian_apply(lap, x, Lx, opts.exec);
    auto dx = dy.head(m);
    dx = -beta * (x - r) - c * Lx;
    for (int i = 0; i < N; ++i) {
      dx.segment(i * n + game.offset(i), game.agent_dim(i)) -=
          Fext.segment(game.offset(i), game.agent_dim(i));
    }
    dy.tail(m) = alpha * (x - r);
  };
  auto record = [&](double t, const Vector& yy) {
    const Vector x = yy.head(m);
    xa = sel.select(x);
    game.pseudo_gradient_into(xa, Fa);
    tr.times.push_back(t);
    tr.x.push_back(x);
    tr.r.push_back(yy.tail(m));
    tr.diagnostics.push_back({t, Fa.norm(), project_orthogonal(x, N).norm(), std::nullopt});
  };
  run_rk4(y, s, f, record, tr);
  tr.wall_time = elapsed(t0);
  return tr;
}

Decomposition decompose(const Game& game, const Vector& x, const Vector& r, double beta,
                        const ResolventOptions& ropts) {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  const int N = game.n_agents();
  const Eigen::Index n = game.dim();
  require_size(x.size(), n * N, "decompose x");
  require_size(r.size(), n * N, "decompose r");
  Decomposition d;
  d.x_par = project_parallel(x, N);
  d.x_perp = x - d.x_par;
  d.r_par = project_parallel(r, N);
  d.r_perp = r - d.r_par;
  const Vector rbar = consensus_average(r, N);
  const double lambda = 1.0 / (beta * N);
  Vector h;
  if (const auto* q = game.quadratic()) {
    h = eval_resolvent(q->A, q->b, lambda, rbar);
  } else {
    h = eval_resolvent(pseudo_gradient_operator(game), lambda, rbar, ropts).u;
  }
  d.z_par = d.x_par - consensus_lift(N, h);
  return d;
}

std::pair<Vector, Vector> discrete_step(const Game& game, const Vector& x, const Vector& r,
                                        double alpha, double beta, double s) {
  if (!(s > 0.0)) throw InputError("step s must be positive");
  require_size(x.size(), game.dim(), "discrete_step x");
  require_size(r.size(), game.dim(), "discrete_step r");
  const Vector Fx = game.pseudo_gradient(x);
  Vector xn = x - s * Fx - s * beta * (x - r);
  Vector rn = r + s * alpha * (x - r);
  return {std::move(xn), std::move(rn)};
}

Vector ogda_step(const GradientFn& grad, const Vector& x_k, const Vector& x_km1, double s) {
  return x_k - (s / 2.0) * (2.0 * grad(x_k) - grad(x_km1));
}

Vector heavy_ball_step(const GradientFn& grad, const Vector& x_k, const Vector& x_km1, double s,
                       double beta) {
  return x_k - s * (grad(x_k) + beta * (x_k - x_km1));
}

}  // namespace heavy_anchor
