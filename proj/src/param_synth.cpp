#include "heavy_anchor/param_synth.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "heavy_anchor/game.hpp"
#include "heavy_anchor/graph.hpp"

namespace heavy_anchor {

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::full_monotone: return "full-monotone";
    case Theorem::full_hypomonotone: return "full-hypo";
    case Theorem::full_quadratic: return "full-quad";
    case Theorem::dist_general: return "dist-general";
    case Theorem::dist_quadratic: return "dist-quad";
  }
  return "?";
}

Theorem theorem_from_string(const std::string& s) {
  for (Theorem t : {Theorem::full_monotone, Theorem::full_hypomonotone, Theorem::full_quadratic,
                    Theorem::dist_general, Theorem::dist_quadratic}) {
    if (s == to_string(t)) return t;
  }
  throw InputError("unknown theorem '" + s +
                   "' (expected full-monotone|full-hypo|full-quad|dist-general|dist-quad)");
}

bool is_distributed(Theorem t) {
  return t == Theorem::dist_general || t == Theorem::dist_quadratic;
}

namespace {

double pick(const OpenInterval& r, double w_lo) {
  if (!r.bounded()) return r.lo + 1.0;
  return w_lo * r.lo + (1.0 - w_lo) * r.hi;
}

double choose(const OpenInterval& r, double w_lo, const std::optional<double>& override_value,
              bool force, const char* name) {
  if (!override_value) return pick(r, w_lo);
  const double v = *override_value;
  if (!(v > 0.0)) throw InputError(std::string(name) + " must be positive");
  if (!r.contains(v) && !force) {
    throw InputError(std::string(name) + " = " + std::to_string(v) +
                     " lies outside the certified range (" + std::to_string(r.lo) + ", " +
                     std::to_string(r.hi) + ")");
  }
  return v;
}

void check_d(double d) {
  if (!(d > 0.0 && d < 1.0)) throw InputError("d must lie in (0, 1)");
}

ParameterCertificate infeasible(ParameterCertificate cert, std::string reason) {
  cert.feasible = false;
  cert.reason = std::move(reason);
  return cert;
}

void fill_constants(CertificateAux& aux, const OperatorConstants& c) {
  aux.mu = c.mu;
  aux.lipschitz = c.lipschitz;
  aux.inv_lipschitz = c.inv_lipschitz;
}

// Shared by the full-information and graph inverse-Lipschitz results.
// slack_div: 1 for beta - mu, N for beta - mu/N; lambda_div: N for lambda = 1/(beta N).
ParameterCertificate inverse_lipschitz_synth(ParameterCertificate cert, const OperatorConstants& c,
                                             double slack_div, double lambda_div,
                                             double interval_div, const SynthOptions& opts) {
  check_d(opts.d);
  cert.d = opts.d;
  fill_constants(cert.aux, c);
  if (!c.inv_lipschitz) return infeasible(std::move(cert), "operator is not inverse Lipschitz");
  const double mu = c.mu;
  const double R = *c.inv_lipschitz;
  cert.beta_range.lo = mu / interval_div;
  cert.beta_range.hi = mu > 0.0 ? 1.0 / (mu * interval_div * R * R)
                                : std::numeric_limits<double>::infinity();
  if (cert.beta_range.empty()) {
    return infeasible(std::move(cert), "beta interval (" + std::to_string(cert.beta_range.lo) +
                                           ", " + std::to_string(cert.beta_range.hi) +
                                           ") is empty: mu*R >= 1");
  }
  cert.beta = choose(cert.beta_range, opts.beta_weight, opts.beta, opts.force, "beta");

  const double lambda = 1.0 / (cert.beta * lambda_div);
  const ResolventConstants rc = resolvent_constants(c, lambda);
  cert.aux.resolvent_lambda = lambda;
  if (!rc.feasible) return infeasible(std::move(cert), "resolvent constants: " + rc.reason);
  const double LJ = *rc.lipschitz;
  const double kJ = *rc.kappa;
  cert.aux.L_J = LJ;
  cert.aux.kappa_J = kJ;

  const double slack = cert.beta - mu / slack_div;
  const double amax = inverse_lipschitz_alpha_max(opts.d, slack, LJ, kJ);
  cert.alpha_range = {0.0, amax};
  if (cert.alpha_range.empty()) {
    return infeasible(std::move(cert), "alpha interval is empty at the chosen beta");
  }
  cert.alpha = choose(cert.alpha_range, opts.alpha_weight, opts.alpha, opts.force, "alpha");
  cert.feasible = true;
  return cert;
}

}  // namespace

double inverse_lipschitz_alpha_max(double d, double slack, double L_J, double kappa_J) {
  const double den = (1.0 - d) + d * (L_J + L_J * L_J);
  return 4.0 * d * (1.0 - d) * slack * (1.0 - kappa_J) / (den * den);
}

ParameterCertificate synth_full_monotone(const SynthOptions& opts) {
  ParameterCertificate cert;
  cert.theorem = Theorem::full_monotone;
  cert.beta_range = {};
  cert.alpha_range = {};
  cert.beta = choose(cert.beta_range, opts.beta_weight, opts.beta, opts.force, "beta");
  cert.alpha = choose(cert.alpha_range, opts.alpha_weight, opts.alpha, opts.force, "alpha");
  cert.aux.mu = 0.0;
  cert.feasible = true;
  return cert;
}

ParameterCertificate synth_full_hypomonotone(const OperatorConstants& c, int n_agents,
                                             const SynthOptions& opts) {
  if (n_agents < 1) throw InputError("n_agents must be >= 1");
  ParameterCertificate cert;
  cert.theorem = Theorem::full_hypomonotone;
  cert.n_agents = n_agents;
  const double slack_div =
      opts.variant == FullInfoAlphaVariant::single_agent ? 1.0 : static_cast<double>(n_agents);
  return inverse_lipschitz_synth(std::move(cert), c, slack_div, 1.0, 1.0, opts);
}

ParameterCertificate synth_partial_general(const OperatorConstants& c, int n_agents,
                                           const CommGraph& g, const SynthOptions& opts) {
  if (n_agents < 1) throw InputError("n_agents must be >= 1");
  if (g.size() != n_agents) throw InputError("graph size must equal the number of agents");
  ParameterCertificate cert;
  cert.theorem = Theorem::dist_general;
  cert.n_agents = n_agents;
  const double N = n_agents;
  const double l2 = lambda2(g);
  cert.aux.lambda2 = l2;
  cert = inverse_lipschitz_synth(std::move(cert), c, N, N, N, opts);
  if (!cert.feasible) return cert;

  const double d = opts.d;
  const double a = cert.alpha;
  const double LJ = *cert.aux.L_J;
  const double kJ = *cert.aux.kappa_J;
  const double slack = cert.beta - c.mu / N;
  const double off = -(a + a * (LJ * LJ + LJ - 1.0) * d) / 2.0;
  Eigen::Matrix2d Phi;
  Phi << (1.0 - d) * a * (1.0 - kJ), off, off, d * slack;
  const double det = Phi.determinant();
  cert.aux.Phi = Phi;
  cert.aux.det_phi = det;
  if (!(Phi(0, 0) > 0.0 && Phi(1, 1) > 0.0 && det > 0.0)) {
    return infeasible(std::move(cert), "Phi is not positive definite at the chosen alpha");
  }
  const double s = 1.0 + d / std::sqrt(N);
  const double eta1 = a * (1.0 - d) * (1.0 - kJ) * s * s + d * slack * LJ * LJ;
  const double eta2 = a * (1.0 + (LJ * LJ + LJ - 1.0) * d) * s * LJ;
  cert.aux.eta1 = eta1;
  cert.aux.eta2 = eta2;
  const double LF = c.lipschitz;
  cert.c_min = ((eta1 + eta2) * LF * LF / (4.0 * det) + LF) / l2;
  return cert;
}

QuadraticStabilityReport quadratic_stability_intervals(const Matrix& A, double scale) {
  if (A.rows() != A.cols() || A.rows() == 0) throw InputError("A must be square and nonempty");
  if (!(scale > 0.0)) throw InputError("scale must be positive");
  QuadraticStabilityReport rep;
  rep.scale = scale;
  Eigen::EigenSolver<Matrix> es(scale * A, false);
  const ComplexVector ev = es.eigenvalues();
  const double zero_tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    EigenClass ec;
    ec.rho = ev[i];
    const double r = ev[i].real();
    const double k = ev[i].imag();
    if (std::abs(ev[i]) <= zero_tol) {
      ec.kind = EigenCase::zero;
    } else if (r >= 0.0) {
      ec.kind = EigenCase::nonnegative;
    } else {
      ec.kind = EigenCase::negative;
      ec.beta = OpenInterval{-r, (k * k + r * r) / (-r)};
      rep.constrained = true;
      const OpenInterval prev = rep.beta_range;
      rep.beta_range.lo = std::max(rep.beta_range.lo, ec.beta->lo);
      rep.beta_range.hi = std::min(rep.beta_range.hi, ec.beta->hi);
      if (!prev.empty() && rep.beta_range.empty() && !rep.blocking) {
        rep.blocking = static_cast<std::size_t>(i);
      }
    }
    rep.eigen.push_back(ec);
  }
  rep.feasible = !rep.beta_range.empty();
  return rep;
}

QuadraticStabilityReport quadratic_stability_intervals(const QuadraticGame& qg, double scale) {
  qg.validate();
  return quadratic_stability_intervals(qg.A, scale);
}

OpenInterval QuadraticStabilityReport::alpha_range(double beta) const {
  OpenInterval out;
  if (!beta_range.contains(beta)) return {0.0, 0.0};
  for (const auto& ec : eigen) {
    if (ec.kind != EigenCase::negative) continue;
    const double r = ec.rho.real();
    const double k = ec.rho.imag();
    const double br = beta + r;
    const double hi = -br + std::sqrt(br * k * k / (-r));
    out.hi = std::min(out.hi, hi);
  }
  return out;
}

std::pair<std::complex<double>, std::complex<double>> eigenvalue_map(std::complex<double> rho,
                                                                     double alpha, double beta) {
  using C = std::complex<double>;
  const C b = alpha + beta + rho;
  const C c = alpha * rho;
  const C disc = std::sqrt(b * b - 4.0 * c);
  // pick the sign that avoids cancellation, recover the other root from the product
  const C s = (std::real(std::conj(b) * disc) >= 0.0) ? b + disc : b - disc;
  if (s == C(0.0)) return {C(0.0), C(0.0)};
  const C l1 = -s / 2.0;
  const C l2 = c / l1;
  return {l1, l2};
}

Matrix anchor_system_matrix(const Matrix& A, double alpha, double beta, double scale) {
  const Eigen::Index n = A.rows();
  Matrix M(2 * n, 2 * n);
  const Matrix I = Matrix::Identity(n, n);
  M.topLeftCorner(n, n) = -scale * A - beta * I;
  M.topRightCorner(n, n) = beta * I;
  M.bottomLeftCorner(n, n) = alpha * I;
  M.bottomRightCorner(n, n) = -alpha * I;
  return M;
}

Matrix solve_lyapunov(const Matrix& M, const Matrix& Q) {
  if (M.rows() != M.cols()) throw InputError("Lyapunov matrix must be square");
  if (Q.rows() != M.rows() || Q.cols() != M.cols()) throw InputError("Lyapunov Q size mismatch");
  const Eigen::Index n = M.rows();
  Eigen::ComplexSchur<Matrix> schur(M);
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();
  double abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) abscissa = std::max(abscissa, T(i, i).real());
  if (!(abscissa < 0.0)) {
    throw InfeasibleError("system matrix is not Hurwitz (spectral abscissa " +
                          std::to_string(abscissa) + ")");
  }
  // X T + T^H X = C with X = U^H P U, C = -U^H Q U; column sweep.
  const Eigen::MatrixXcd C = -(U.adjoint() * Q.cast<std::complex<double>>() * U);
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd TH = T.adjoint();
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = C.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= X.col(k) * T(k, j);
    Eigen::MatrixXcd S = TH;
    S.diagonal().array() += T(j, j);
    X.col(j) = S.triangularView<Eigen::Lower>().solve(rhs);
  }
  Matrix P = (U * X * U.adjoint()).real();
  return 0.5 * (P + P.transpose());
}

Matrix extended_matrix(const QuadraticGame& qg) {
  qg.validate();
  const Eigen::Index n = qg.dim();
  const int N = static_cast<int>(qg.dims.size());
  Matrix E = Matrix::Zero(n, n * N);
  Eigen::Index off = 0;
  for (int i = 0; i < N; ++i) {
    const int ni = qg.dims[static_cast<std::size_t>(i)];
    E.block(off, i * n, ni, n) = qg.A.middleRows(off, ni);
    off += ni;
  }
  return E;
}

double extended_matrix_norm(const QuadraticGame& qg) {
  // row blocks have disjoint column supports, so the norm is the largest block norm
  qg.validate();
  double best = 0.0;
  Eigen::Index off = 0;
  for (int ni : qg.dims) {
    Eigen::JacobiSVD<Matrix> svd(qg.A.middleRows(off, ni));
    best = std::max(best, svd.singularValues()(0));
    off += ni;
  }
  return best;
}

ParameterCertificate synth_full_quadratic(const QuadraticGame& qg, const SynthOptions& opts) {
  ParameterCertificate cert;
  cert.theorem = Theorem::full_quadratic;
  cert.n_agents = static_cast<int>(qg.dims.size());
  const auto rep = quadratic_stability_intervals(qg);
  cert.aux.stability = rep;
  cert.beta_range = rep.beta_range;
  if (!rep.feasible) {
    std::string why = "beta intervals do not intersect";
    if (rep.blocking) {
      const auto rho = rep.eigen[*rep.blocking].rho;
      why += " (blocked by eigenvalue " + std::to_string(rho.real()) + (rho.imag() < 0 ? "" : "+") +
             std::to_string(rho.imag()) + "j)";
    }
    return infeasible(std::move(cert), why);
  }
  cert.beta = choose(cert.beta_range, opts.beta_weight, opts.beta, opts.force, "beta");
  cert.alpha_range = rep.constrained ? rep.alpha_range(cert.beta) : OpenInterval{};
  if (cert.alpha_range.empty()) return infeasible(std::move(cert), "alpha interval is empty");
  cert.alpha = choose(cert.alpha_range, opts.alpha_weight, opts.alpha, opts.force, "alpha");
  cert.feasible = true;
  return cert;
}

ParameterCertificate synth_quadratic_partial(const QuadraticGame& qg, const CommGraph& g,
                                             const SynthOptions& opts) {
  qg.validate();
  const int N = static_cast<int>(qg.dims.size());
  if (g.size() != N) throw InputError("graph size must equal the number of agents");
  ParameterCertificate cert;
  cert.theorem = Theorem::dist_quadratic;
  cert.n_agents = N;
  const double l2 = lambda2(g);
  cert.aux.lambda2 = l2;
  const auto rep = quadratic_stability_intervals(qg.A, 1.0 / N);
  cert.aux.stability = rep;
  cert.beta_range = rep.beta_range;
  if (!rep.feasible) return infeasible(std::move(cert), "beta intervals do not intersect");
  cert.beta = choose(cert.beta_range, opts.beta_weight, opts.beta, opts.force, "beta");
  cert.alpha_range = rep.constrained ? rep.alpha_range(cert.beta) : OpenInterval{};
  if (cert.alpha_range.empty()) return infeasible(std::move(cert), "alpha interval is empty");
  cert.alpha = choose(cert.alpha_range, opts.alpha_weight, opts.alpha, opts.force, "alpha");

  const Matrix Mt = anchor_system_matrix(qg.A, cert.alpha, cert.beta, 1.0 / N);
  const Matrix P = solve_lyapunov(Mt, Matrix::Identity(Mt.rows(), Mt.cols()));
  Eigen::JacobiSVD<Matrix> svdP(P);
  const double p = svdP.singularValues()(0);
  Eigen::JacobiSVD<Matrix> svdA(qg.A);
  const double LA = svdA.singularValues()(0);
  const double Lext = extended_matrix_norm(qg);
  cert.aux.P = P;
  cert.aux.p = p;
  cert.aux.L_A = LA;
  cert.aux.L_ext = Lext;
  const double t = Lext * (p / std::sqrt(static_cast<double>(N)) + 0.5);
  cert.c_min = (Lext + t * t) / l2;
  if (cert.alpha == cert.beta) {
    const double bound = N / (2.0 * LA + 4.0 * cert.alpha * N);
    cert.aux.p_simple_bound = bound;
    cert.aux.p_bound_holds = p <= bound + 1e-9;
  }
  cert.feasible = true;
  return cert;
}

bool accepts(const ParameterCertificate& cert, double alpha, double beta) {
  return cert.feasible && cert.beta_range.contains(beta) && cert.alpha_range.contains(alpha);
}

}  // namespace heavy_anchor
