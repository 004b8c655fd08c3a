#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "heavy_anchor/common.hpp"
#include "heavy_anchor/kernels.hpp"

namespace heavy_anchor {

class Game;
struct QuadraticGame;

// Single-valued operator on R^n, written into `out`.
using Operator = std::function<void(const Eigen::Ref<const Vector>&, Eigen::Ref<Vector>)>;

Operator pseudo_gradient_operator(const Game& game);
Operator linear_operator(const Matrix& A, const Vector& b);

enum class Provenance { exact, sampled };
const char* to_string(Provenance p);

// mu: hypomonotonicity modulus, <Tx-Ty,x-y> >= -mu|x-y|^2.
// inv_lipschitz: R with |x-y| <= R|Tx-Ty|; absent when T is not injective.
struct OperatorConstants {
  double mu = 0.0;
  double lipschitz = 0.0;
  std::optional<double> inv_lipschitz;
  Provenance provenance = Provenance::exact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

OperatorConstants exact_linear_constants(const Matrix& A);
OperatorConstants exact_quadratic_constants(const QuadraticGame& qg);

struct SamplingOptions {
  double box_lo = -10.0;
  double box_hi = 10.0;
  std::uint64_t pairs = 100000;
  std::uint64_t seed = 1;
  double local_fraction = 0.5;  // share of Jacobian-directed pairs
  double local_step = 1e-4;
  kernels::Exec exec = kernels::Exec::serial;
};

// Sampled moduli. Each estimate is a ratio over a real pair, so it is a lower
// bound on the true modulus.
OperatorConstants sampled_constants(const Operator& op, Eigen::Index dim,
                                    const SamplingOptions& opts = {});

struct ResolventConstants {
  double lambda = 0.0;
  bool feasible = false;
  std::optional<double> lipschitz;  // L_J
  std::optional<double> kappa;      // kappa_J
  std::string reason;
};

// Feasible iff mu R^2 <= lambda < 1/mu.
ResolventConstants resolvent_constants(const OperatorConstants& c, double lambda);

// Largest observed violation of the resolvent Lipschitz and inner-product
// bounds over random pairs, for a linear T. Nonpositive means both held.
struct ResolventBoundCheck {
  double lipschitz_violation = 0.0;
  double inner_violation = 0.0;
  std::uint64_t pairs = 0;
};
ResolventBoundCheck check_resolvent_bounds(const Matrix& A, double lambda,
                                           const ResolventConstants& rc, std::uint64_t pairs,
                                           std::uint64_t seed,
                                           kernels::Exec exec = kernels::Exec::serial);

// (I + lambda A) u = v - lambda b
Vector eval_resolvent(const Matrix& A, const Vector& b, double lambda, const Vector& v);

struct ResolventOptions {
  double tol = 1e-10;  // relative to 1 + |v|
  int fixed_point_iters = 5000;
  int newton_iters = 60;
  double mu = 0.0;          // used for the relaxation weight
  double lipschitz = 0.0;   // 0: estimated from a probe
  const Vector* initial_guess = nullptr;
};

struct ResolventResult {
  Vector u;
  double residual = 0.0;
  int iterations = 0;
  bool used_newton = false;
};

// Solves u + lambda T(u) = v. Throws ConvergenceError with the residual.
ResolventResult eval_resolvent(const Operator& T, double lambda, const Vector& v,
                               const ResolventOptions& opts = {});

// Relations between moduli. Missing values stay empty.
struct Moduli {
  std::optional<double> strong_monotone;
  std::optional<double> lipschitz;
  std::optional<double> cocoercive;
  std::optional<double> inv_lipschitz;
};

enum class DerivationRule {
  cocoercive_to_lipschitz,           // L = 1/C
  lipschitz_to_cocoercive,           // C = 1/L, convex gradients only
  strong_monotone_to_inv_lipschitz,  // R = 1/mu
  inv_lipschitz_to_strong_monotone,  // mu = 1/R, convex gradients only
  strong_monotone_lipschitz_to_cocoercive,  // C = mu/L^2
  cocoercive_inv_lipschitz_to_strong_monotone,  // mu = C/R^2
};

Moduli derive_constants(const Moduli& in, DerivationRule rule, bool convex_gradient = false);

}  // namespace heavy_anchor
