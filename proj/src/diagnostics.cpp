#include "heavy_anchor/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "heavy_anchor/dynamics.hpp"
#include "heavy_anchor/game.hpp"
#include "heavy_anchor/graph.hpp"
#include "heavy_anchor/param_synth.hpp"

namespace heavy_anchor {

namespace {

Vector resolvent_of(const Game& game, double lambda, const Vector& v, const ResolventOptions& ro) {
  if (const auto* q = game.quadratic()) return eval_resolvent(q->A, q->b, lambda, v);
  return eval_resolvent(pseudo_gradient_operator(game), lambda, v, ro).u;
}

}  // namespace

const char* to_string(LyapunovKind k) {
  switch (k) {
    case LyapunovKind::full_monotone: return "full-monotone";
    case LyapunovKind::full_hypomonotone: return "full-hypo";
    case LyapunovKind::full_quadratic: return "full-quad";
    case LyapunovKind::dist_monotone: return "dist-monotone";
    case LyapunovKind::dist_general: return "dist-general";
    case LyapunovKind::dist_quadratic: return "dist-quad";
  }
  return "?";
}

LyapunovKind lyapunov_kind_from_string(const std::string& s) {
  for (LyapunovKind k : {LyapunovKind::full_monotone, LyapunovKind::full_hypomonotone,
                         LyapunovKind::full_quadratic,
                         LyapunovKind::dist_monotone, LyapunovKind::dist_general,
                         LyapunovKind::dist_quadratic}) {
    if (s == to_string(k)) return k;
  }
  throw InputError("unknown Lyapunov kind '" + s + "'");
}

LyapunovSpec lyapunov_for(const ParameterCertificate& cert, const Game& game,
                          const Vector& equilibrium) {
  if (!cert.feasible) throw InfeasibleError("certificate is infeasible: " + cert.reason);
  require_size(equilibrium.size(), game.dim(), "equilibrium");
  LyapunovSpec s;
  s.alpha = cert.alpha;
  s.beta = cert.beta;
  s.n_agents = game.n_agents();
  s.equilibrium = equilibrium;
  s.game = &game;
  switch (cert.theorem) {
    case Theorem::full_monotone:
      s.kind = LyapunovKind::full_monotone;
      break;
    case Theorem::full_hypomonotone:
      s.kind = LyapunovKind::full_hypomonotone;
      s.d = cert.d.value_or(0.5);
      if (cert.aux.mu) s.resolvent.mu = *cert.aux.mu;
      if (cert.aux.lipschitz) s.resolvent.lipschitz = *cert.aux.lipschitz;
      break;
    case Theorem::full_quadratic: {
      const auto* q = game.quadratic();
      if (!q) throw InputError("full-quad Lyapunov needs a quadratic game");
      s.kind = LyapunovKind::full_quadratic;
      const Matrix M = anchor_system_matrix(q->A, cert.alpha, cert.beta);
      s.P = solve_lyapunov(M, Matrix::Identity(M.rows(), M.cols()));
      break;
    }
    case Theorem::dist_general:
      s.kind = LyapunovKind::dist_general;
      s.d = cert.d.value_or(0.5);
      if (cert.aux.mu) s.resolvent.mu = *cert.aux.mu;
      if (cert.aux.lipschitz) s.resolvent.lipschitz = *cert.aux.lipschitz;
      break;
    case Theorem::dist_quadratic:
      s.kind = LyapunovKind::dist_quadratic;
      if (!cert.aux.P) throw InputError("dist-quad certificate carries no P");
      s.P = *cert.aux.P;
      break;
  }
  return s;
}

double evaluate_lyapunov(const LyapunovSpec& s, const Vector& x, const Vector& r) {
  const Vector& xs = s.equilibrium;
  const Eigen::Index n = xs.size();
  const int N = s.n_agents;
  switch (s.kind) {
    case LyapunovKind::full_monotone: {
      require_size(x.size(), n, "Lyapunov x");
      require_size(r.size(), n, "Lyapunov r");
      return 0.5 * (x - xs).squaredNorm() + s.beta / (2.0 * s.alpha) * (r - xs).squaredNorm();
    }
    case LyapunovKind::full_hypomonotone: {
      if (!s.game) throw InputError("full-hypo Lyapunov needs the game");
      require_size(x.size(), n, "Lyapunov x");
      require_size(r.size(), n, "Lyapunov r");
      const Vector h = resolvent_of(*s.game, 1.0 / s.beta, r, s.resolvent);
      return (1.0 - s.d) / 2.0 * (r - xs).squaredNorm() + s.d / 2.0 * (x - h).squaredNorm();
    }
    case LyapunovKind::full_quadratic: {
      require_size(x.size(), n, "Lyapunov x");
      require_size(r.size(), n, "Lyapunov r");
      Vector w(2 * n);
      w << x - xs, r - xs;
      return std::max(0.0, w.dot(s.P * w));
    }
    case LyapunovKind::dist_monotone: {
      const Vector xl = consensus_lift(N, xs);
      require_size(x.size(), xl.size(), "Lyapunov x");
      return 0.5 * (x - xl).squaredNorm() + s.beta / (2.0 * s.alpha) * (r - xl).squaredNorm();
    }
    case LyapunovKind::dist_general: {
      if (!s.game) throw InputError("dist-general Lyapunov needs the game");
      require_size(x.size(), n * N, "Lyapunov x");
      const Decomposition d = decompose(*s.game, x, r, s.beta, s.resolvent);
      const Vector rl = consensus_lift(N, xs);
      return (1.0 - s.d) / 2.0 * (d.r_par - rl).squaredNorm() +
             s.d / 2.0 * d.z_par.squaredNorm() + 0.5 * d.x_perp.squaredNorm() +
             s.beta / (2.0 * s.alpha) * d.r_perp.squaredNorm();
    }
    case LyapunovKind::dist_quadratic: {
      require_size(x.size(), n * N, "Lyapunov x");
      const Vector xperp = project_orthogonal(x, N);
      const Vector rperp = project_orthogonal(r, N);
      Vector w(2 * n);
      w << consensus_average(x, N) - xs, consensus_average(r, N) - xs;
      return 0.5 * xperp.squaredNorm() + s.beta / (2.0 * s.alpha) * rperp.squaredNorm() +
             std::max(0.0, N * w.dot(s.P * w));
    }
  }
  throw InputError("unknown Lyapunov kind");
}

void attach_lyapunov(Trajectory& tr, const LyapunovSpec& spec) {
  if (tr.r.size() != tr.x.size()) throw InputError("trajectory has no auxiliary states");
  for (std::size_t k = 0; k < tr.size(); ++k) {
    tr.diagnostics[k].lyapunov = evaluate_lyapunov(spec, tr.x[k], tr.r[k]);
  }
}

MonotonicityReport check_lyapunov_decrease(const Trajectory& tr, double rel_slack) {
  MonotonicityReport rep;
  if (tr.empty() || !tr.diagnostics.front().lyapunov) {
    throw InputError("trajectory has no Lyapunov values");
  }
  rep.v0 = *tr.diagnostics.front().lyapunov;
  rep.slack = rel_slack * (1.0 + rep.v0);
  rep.worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double inc = *tr.diagnostics[k].lyapunov - *tr.diagnostics[k - 1].lyapunov;
    if (inc > rep.worst_increase) {
      rep.worst_increase = inc;
      rep.worst_index = k;
    }
  }
  if (tr.size() < 2) rep.worst_increase = 0.0;
  rep.v_final = *tr.diagnostics.back().lyapunov;
  rep.non_increasing = rep.worst_increase <= rep.slack;
  return rep;
}

ConvergenceVerdict detect_convergence(const Trajectory& tr, double tol_residual,
                                      double tol_consensus) {
  ConvergenceVerdict v;
  if (tr.empty()) return v;
  v.final_residual = tr.diagnostics.back().ne_residual;
  v.final_consensus = tr.diagnostics.back().consensus_error;
  if (tr.aborted) return v;
  std::optional<std::size_t> first;
  for (std::size_t k = tr.size(); k-- > 0;) {
    const auto& dg = tr.diagnostics[k];
    if (dg.ne_residual <= tol_residual && dg.consensus_error <= tol_consensus) {
      first = k;
    } else {
      break;
    }
  }
  if (first) {
    v.converged = true;
    v.time = tr.times[*first];
  }
  return v;
}

RateEstimate estimate_rate(const Trajectory& tr, const Vector& equilibrium, double min_r_squared,
                           std::size_t min_samples, double floor) {
  RateEstimate est;
  if (tr.empty()) {
    est.note = "empty trajectory";
    return est;
  }
  const Vector target = tr.distributed ? consensus_lift(tr.n_agents, equilibrium) : equilibrium;
  std::vector<double> t, y;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double dist = (tr.x[k] - target).norm();
    if (dist > floor) {
      t.push_back(tr.times[k]);
      y.push_back(std::log(dist));
    }
  }
  if (t.empty()) {
    est.note = "trajectory sits at the equilibrium; rate undefined";
    return est;
  }
  const std::size_t start = t.size() / 2;
  const std::size_t m = t.size() - start;
  est.samples = m;
  if (m < min_samples) {
    est.note = "fewer than " + std::to_string(min_samples) + " tail samples above the floor";
    return est;
  }
  double st = 0, sy = 0;
  for (std::size_t k = start; k < t.size(); ++k) {
    st += t[k];
    sy += y[k];
  }
  const double mt = st / m, my = sy / m;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t k = start; k < t.size(); ++k) {
    stt += (t[k] - mt) * (t[k] - mt);
    sty += (t[k] - mt) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  const double slope = sty / stt;
  est.t_begin = t[start];
  est.t_end = t.back();
  est.r_squared = syy > 0 ? (sty * sty) / (stt * syy) : 1.0;
  est.rate = -slope;
  if (est.r_squared < min_r_squared) {
    est.note = "fit residual too large";
    return est;
  }
  est.available = std::isfinite(est.rate);
  return est;
}

}  // namespace heavy_anchor
