#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heavy_anchor/common.hpp"
#include "heavy_anchor/operator_analysis.hpp"

namespace heavy_anchor {

class CommGraph;
struct QuadraticGame;

struct OpenInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool empty() const { return !(hi > lo); }
  bool contains(double v) const { return v > lo && v < hi; }
  bool bounded() const { return std::isfinite(hi); }
};

enum class Theorem {
  full_monotone,      // any alpha, beta > 0
  full_hypomonotone,  // inverse-Lipschitz, full information
  full_quadratic,     // eigenvalue intervals on A
  dist_general,       // inverse-Lipschitz, graph
  dist_quadratic,     // eigenvalue intervals on A/N plus Lyapunov bound on c
};

const char* to_string(Theorem t);
Theorem theorem_from_string(const std::string& s);
bool is_distributed(Theorem t);

// Which slack appears in the full-information alpha bound.
enum class FullInfoAlphaVariant {
  single_agent,  // beta - mu
  per_agent,     // beta - mu/N, as printed for the graph setting
};

enum class EigenCase { zero, nonnegative, negative };

struct EigenClass {
  std::complex<double> rho;
  EigenCase kind = EigenCase::zero;
  std::optional<OpenInterval> beta;  // negative real part only
};

struct QuadraticStabilityReport {
  std::vector<EigenClass> eigen;
  double scale = 1.0;  // intervals refer to scale * A
  bool constrained = false;
  bool feasible = true;
  OpenInterval beta_range;
  std::optional<std::size_t> blocking;  // eigenvalue that emptied the beta intersection

  // Intersection of the alpha intervals for this beta. Empty when beta is
  // outside beta_range.
  OpenInterval alpha_range(double beta) const;
};

QuadraticStabilityReport quadratic_stability_intervals(const Matrix& A, double scale = 1.0);
QuadraticStabilityReport quadratic_stability_intervals(const QuadraticGame& qg,
                                                       double scale = 1.0);

// Roots of lambda^2 + (alpha + beta + rho) lambda + alpha rho.
std::pair<std::complex<double>, std::complex<double>> eigenvalue_map(std::complex<double> rho,
                                                                     double alpha, double beta);

// [[-s A - beta I, beta I], [alpha I, -alpha I]]
Matrix anchor_system_matrix(const Matrix& A, double alpha, double beta, double scale = 1.0);

// Solves P M + M^T P = -Q. Throws InfeasibleError if M is not Hurwitz.
Matrix solve_lyapunov(const Matrix& M, const Matrix& Q);

// Spectral norm of the n x Nn matrix mapping stacked estimates to the
// extended pseudo-gradient.
double extended_matrix_norm(const QuadraticGame& qg);
Matrix extended_matrix(const QuadraticGame& qg);

struct CertificateAux {
  std::optional<double> mu;
  std::optional<double> lipschitz;
  std::optional<double> inv_lipschitz;
  std::optional<double> resolvent_lambda;
  std::optional<double> L_J;
  std::optional<double> kappa_J;
  std::optional<Eigen::Matrix2d> Phi;
  std::optional<double> det_phi;
  std::optional<double> eta1;
  std::optional<double> eta2;
  std::optional<double> lambda2;
  std::optional<double> L_A;         // |A|
  std::optional<double> L_ext;       // |bold A|
  std::optional<Matrix> P;
  std::optional<double> p;
  std::optional<double> p_simple_bound;  // only when beta == alpha
  std::optional<bool> p_bound_holds;
  std::optional<QuadraticStabilityReport> stability;
};

struct ParameterCertificate {
  Theorem theorem = Theorem::full_monotone;
  bool feasible = false;
  std::string reason;
  int n_agents = 1;
  OpenInterval beta_range;
  OpenInterval alpha_range;
  double beta = 0.0;
  double alpha = 0.0;
  std::optional<double> d;
  std::optional<double> c_min;
  CertificateAux aux;
};

struct SynthOptions {
  double d = 0.5;
  double beta_weight = 0.9;   // beta = w*beta_min + (1-w)*beta_max
  double alpha_weight = 0.5;  // alpha = w*alpha_min + (1-w)*alpha_max
  std::optional<double> beta;
  std::optional<double> alpha;
  bool force = false;  // allow overrides outside the certified ranges
  FullInfoAlphaVariant variant = FullInfoAlphaVariant::single_agent;
};

ParameterCertificate synth_full_monotone(const SynthOptions& opts = {});
ParameterCertificate synth_full_hypomonotone(const OperatorConstants& c, int n_agents,
                                             const SynthOptions& opts = {});
ParameterCertificate synth_partial_general(const OperatorConstants& c, int n_agents,
                                           const CommGraph& g, const SynthOptions& opts = {});
ParameterCertificate synth_full_quadratic(const QuadraticGame& qg, const SynthOptions& opts = {});
ParameterCertificate synth_quadratic_partial(const QuadraticGame& qg, const CommGraph& g,
                                             const SynthOptions& opts = {});

// 4d(1-d) slack (1-kappa_J) / ((1-d) + d(L_J + L_J^2))^2
double inverse_lipschitz_alpha_max(double d, double slack, double L_J, double kappa_J);

// Whether (alpha, beta) lies inside the certificate's ranges.
bool accepts(const ParameterCertificate& cert, double alpha, double beta);

}  // namespace heavy_anchor
