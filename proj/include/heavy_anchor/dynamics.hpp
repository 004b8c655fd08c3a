#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "heavy_anchor/common.hpp"
#include "heavy_anchor/kernels.hpp"
#include "heavy_anchor/operator_analysis.hpp"
#include "heavy_anchor/trajectory.hpp"

namespace heavy_anchor {

class Game;
class CommGraph;

struct IntegratorOptions {
  double T = 10.0;
  std::optional<double> h;            // default: min(h_cap, stiffness_factor / stiffness)
  double h_cap = 0.01;
  double stiffness_factor = 1.0;
  std::optional<double> lipschitz;    // L_F used in the default step
  std::optional<std::uint64_t> max_steps;  // caps the horizon at max_steps * h
  std::uint64_t decimation = 0;       // 0: about max_samples stored samples
  std::uint64_t max_samples = 2000;
  std::uint64_t seed = 0;             // recorded only
  kernels::Exec exec = kernels::Exec::serial;
};

Trajectory simulate_gradient_play(const Game& game, const Vector& x0,
                                  const IntegratorOptions& opts);

Trajectory simulate_heavy_anchor_full(const Game& game, const Vector& x0, const Vector& r0,
                                      double alpha, double beta, const IntegratorOptions& opts);

Trajectory simulate_heavy_anchor_distributed(const Game& game, const CommGraph& g,
                                             const Vector& x0, const Vector& r0, double alpha,
                                             double beta, double c,
                                             const IntegratorOptions& opts);

// Step size the simulators pick when opts.h is unset.
double default_step(double lipschitz, double beta, double c_lambda_max,
                    const IntegratorOptions& opts);

// Uniform [lo, hi] initial condition from a seed.
Vector random_initial_state(Eigen::Index size, std::uint64_t seed, double lo = -10.0,
                            double hi = 10.0);

struct Decomposition {
  Vector x_par;
  Vector x_perp;
  Vector r_par;
  Vector r_perp;
  Vector z_par;  // x_par - h(r_par)
};

// Consensus split of a stacked state. h is the resolvent of F with
// lambda = 1/(beta N), lifted to the consensus subspace.
Decomposition decompose(const Game& game, const Vector& x, const Vector& r, double beta,
                        const ResolventOptions& ropts = {});

// Euler step of the anchored dynamics.
std::pair<Vector, Vector> discrete_step(const Game& game, const Vector& x, const Vector& r,
                                        double alpha, double beta, double s);

using GradientFn = std::function<Vector(const Vector&)>;

// x_k - (s/2)(2 g(x_k) - g(x_{k-1}))
Vector ogda_step(const GradientFn& grad, const Vector& x_k, const Vector& x_km1, double s);
// x_k - s (g(x_k) + beta (x_k - x_{k-1}))
Vector heavy_ball_step(const GradientFn& grad, const Vector& x_k, const Vector& x_km1, double s,
                       double beta);

}  // namespace heavy_anchor
