#pragma once

#include <optional>
#include <string>

#include "heavy_anchor/common.hpp"
#include "heavy_anchor/operator_analysis.hpp"
#include "heavy_anchor/trajectory.hpp"

namespace heavy_anchor {

class Game;
struct ParameterCertificate;

enum class LyapunovKind {
  full_monotone,   // 1/2|x-x*|^2 + beta/(2 alpha)|r-x*|^2
  full_hypomonotone,  // (1-d)/2|r-x*|^2 + d/2|x - J(r)|^2, J the resolvent of F/beta
  full_quadratic,  // w^T P w, P M + M^T P = -I
  dist_monotone,   // lifted version of full_monotone
  dist_general,    // consensus-weighted form with d and the resolvent coordinate
  dist_quadratic,  // orthogonal energy plus N * wbar^T P wbar
};

const char* to_string(LyapunovKind k);
LyapunovKind lyapunov_kind_from_string(const std::string& s);

struct LyapunovSpec {
  LyapunovKind kind = LyapunovKind::full_monotone;
  double alpha = 1.0;
  double beta = 1.0;
  double d = 0.5;
  int n_agents = 1;
  Vector equilibrium;  // x*, length n
  Matrix P;            // quadratic kinds
  const Game* game = nullptr;  // resolvent-based kinds
  ResolventOptions resolvent;
};

// Spec matching the certificate's governing result. The game must outlive
// the returned spec.
LyapunovSpec lyapunov_for(const ParameterCertificate& cert, const Game& game,
                          const Vector& equilibrium);

double evaluate_lyapunov(const LyapunovSpec& spec, const Vector& x, const Vector& r);

// Fills diagnostics[k].lyapunov for every stored sample.
void attach_lyapunov(Trajectory& tr, const LyapunovSpec& spec);

struct MonotonicityReport {
  bool non_increasing = true;
  double worst_increase = 0.0;  // largest V[k+1] - V[k]
  std::size_t worst_index = 0;
  double slack = 0.0;
  double v0 = 0.0;
  double v_final = 0.0;
};

// Non-increasing up to rel_slack * (1 + V0) per sample.
MonotonicityReport check_lyapunov_decrease(const Trajectory& tr, double rel_slack = 1e-8);

struct ConvergenceVerdict {
  bool converged = false;
  std::optional<double> time;  // first time after which both metrics stay below
  double final_residual = 0.0;
  double final_consensus = 0.0;
};

ConvergenceVerdict detect_convergence(const Trajectory& tr, double tol_residual,
                                      double tol_consensus);

// Exploratory exponential fit of log|x(t) - x*| over the tail.
struct RateEstimate {
  bool available = false;
  double rate = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
  std::string note;
};

RateEstimate estimate_rate(const Trajectory& tr, const Vector& equilibrium,
                           double min_r_squared = 0.99, std::size_t min_samples = 50,
                           double floor = 1e-11);

}  // namespace heavy_anchor
