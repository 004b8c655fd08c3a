#include "heavy_anchor/operator_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "heavy_anchor/game.hpp"

namespace heavy_anchor {

Operator pseudo_gradient_operator(const Game& game) {
  return [&game](const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) {
    game.pseudo_gradient_into(x, out);
  };
}

Operator linear_operator(const Matrix& A, const Vector& b) {
  require_size(b.size(), A.rows(), "linear operator offset");
  return [A, b](const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) {
    out.noalias() = A * x;
    out += b;
  };
}

const char* to_string(Provenance p) { return p == Provenance::exact ? "exact" : "sampled"; }

OperatorConstants exact_linear_constants(const Matrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw InputError("operator matrix must be square");
  OperatorConstants c;
  const Matrix S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  c.mu = std::max(0.0, -es.eigenvalues().minCoeff());
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& sv = svd.singularValues();
  c.lipschitz = sv.maxCoeff();
  const double smin = sv.minCoeff();
  if (smin > std::numeric_limits<double>::epsilon() * std::max(1.0, c.lipschitz) * A.rows()) {
    c.inv_lipschitz = 1.0 / smin;
  }
  c.provenance = Provenance::exact;
  return c;
}

OperatorConstants exact_quadratic_constants(const QuadraticGame& qg) {
  qg.validate();
  return exact_linear_constants(qg.A);
}

namespace {

Matrix fd_jacobian(const Operator& op, const Vector& p) {
  const Eigen::Index n = p.size();
  Matrix J(n, n);
  Vector xp = p, fp(n), fm(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(p[j]));
    xp[j] = p[j] + h;
    op(xp, fp);
    xp[j] = p[j] - h;
    op(xp, fm);
    xp[j] = p[j];
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

}  // namespace

OperatorConstants sampled_constants(const Operator& op, Eigen::Index dim,
                                    const SamplingOptions& opts) {
  if (dim < 1) throw InputError("sampling dimension must be >= 1");
  if (opts.pairs < 1000) throw InputError("sampled_constants needs at least 1000 pairs");
  if (!(opts.box_hi > opts.box_lo)) throw InputError("sampling box must have box_hi > box_lo");
  if (opts.local_fraction < 0.0 || opts.local_fraction > 1.0) {
    throw InputError("local_fraction must lie in [0, 1]");
  }

  auto work = [&](std::uint64_t i, kernels::PairExtremes& acc) {
    auto rng = SplitMix64::stream(opts.seed, i);
    Vector x(dim), y(dim), tx(dim), ty(dim);
    const bool local = rng.uniform() < opts.local_fraction;
    if (!local) {
      for (Eigen::Index k = 0; k < dim; ++k) x[k] = rng.uniform(opts.box_lo, opts.box_hi);
      for (Eigen::Index k = 0; k < dim; ++k) y[k] = rng.uniform(opts.box_lo, opts.box_hi);
    } else {
      Vector p(dim);
      for (Eigen::Index k = 0; k < dim; ++k) p[k] = rng.uniform(opts.box_lo, opts.box_hi);
      const Matrix J = fd_jacobian(op, p);
      Vector v;
      switch (rng.next() % 3) {
        case 0: {
          Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (J + J.transpose()));
          v = es.eigenvectors().col(0);
          break;
        }
        case 1: {
          Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullV);
          v = svd.matrixV().col(0);
          break;
        }
        default: {
          Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullV);
          v = svd.matrixV().col(dim - 1);
          break;
        }
      }
      x = p - 0.5 * opts.local_step * v;
      y = p + 0.5 * opts.local_step * v;
    }
    op(x, tx);
    op(y, ty);
    acc.add(x - y, tx - ty);
  };

  const auto ext =
      kernels::reduce_indexed(opts.pairs, kernels::PairExtremes{}, work, opts.exec);
  if (ext.used == 0) throw InputError("all sample pairs were coincident or non-finite");

  OperatorConstants c;
  c.mu = std::max(0.0, ext.neg_monotone);
  c.lipschitz = ext.lipschitz;
  if (!ext.unbounded_inverse && ext.inv_lipschitz > 0.0) c.inv_lipschitz = ext.inv_lipschitz;
  c.provenance = Provenance::sampled;
  c.samples = ext.used;
  c.seed = opts.seed;
  return c;
}

ResolventConstants resolvent_constants(const OperatorConstants& c, double lambda) {
  if (!(lambda > 0.0)) throw InputError("resolvent lambda must be positive");
  ResolventConstants rc;
  rc.lambda = lambda;
  if (!c.inv_lipschitz) {
    rc.reason = "operator has no inverse-Lipschitz modulus";
    return rc;
  }
  const double R = *c.inv_lipschitz;
  const double mu = c.mu;
  if (mu * R * R > lambda) {
    rc.reason = "lambda below mu*R^2";
    return rc;
  }
  if (mu * lambda >= 1.0) {
    rc.reason = "lambda not below 1/mu";
    return rc;
  }
  const double denom = R * R + lambda * lambda - 2.0 * lambda * mu * R * R;
  rc.feasible = true;
  rc.lipschitz = std::sqrt(R * R / denom);
  if (R >= lambda) {
    rc.kappa = R * R * (1.0 - mu * lambda) / denom;
  } else {
    rc.kappa = R * R * (1.0 + lambda / R) / (R * R + lambda * lambda + 2.0 * lambda * R);
  }
  return rc;
}

ResolventBoundCheck check_resolvent_bounds(const Matrix& A, double lambda,
                                           const ResolventConstants& rc, std::uint64_t pairs,
                                           std::uint64_t seed, kernels::Exec exec) {
  if (!rc.feasible) throw InfeasibleError("resolvent constants are infeasible: " + rc.reason);
  const Eigen::Index n = A.rows();
  const Matrix M = Matrix::Identity(n, n) + lambda * A;
  const Eigen::PartialPivLU<Matrix> lu(M);
  const Matrix J = lu.inverse();
  const double LJ = *rc.lipschitz;
  const double kJ = *rc.kappa;

  struct Acc {
    double lip = -std::numeric_limits<double>::infinity();
    double inner = -std::numeric_limits<double>::infinity();
    void merge(const Acc& o) {
      lip = std::max(lip, o.lip);
      inner = std::max(inner, o.inner);
    }
  };
  auto work = [&](std::uint64_t i, Acc& acc) {
    auto rng = SplitMix64::stream(seed, i);
    Vector x(n), y(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = rng.uniform(-10.0, 10.0);
    for (Eigen::Index k = 0; k < n; ++k) y[k] = rng.uniform(-10.0, 10.0);
    const Vector d = x - y;
    const Vector jd = J * x - J * y;
    acc.lip = std::max(acc.lip, jd.norm() - LJ * d.norm());
    acc.inner = std::max(acc.inner, d.dot(jd) - kJ * d.squaredNorm());
  };
  const Acc a = kernels::reduce_indexed(pairs, Acc{}, work, exec);
  return {a.lip, a.inner, pairs};
}

Vector eval_resolvent(const Matrix& A, const Vector& b, double lambda, const Vector& v) {
  if (!(lambda > 0.0)) throw InputError("resolvent lambda must be positive");
  require_size(v.size(), A.rows(), "resolvent argument");
  require_size(b.size(), A.rows(), "resolvent offset");
  const Matrix M = Matrix::Identity(A.rows(), A.cols()) + lambda * A;
  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) {
    throw SingularSystemError("I + lambda*A is singular", lu.rank(), M.rows());
  }
  const Vector rhs = v - lambda * b;
  Vector u = lu.solve(rhs);
  u -= lu.solve(M * u - rhs);
  return u;
}

ResolventResult eval_resolvent(const Operator& T, double lambda, const Vector& v,
                               const ResolventOptions& opts) {
  if (!(lambda > 0.0)) throw InputError("resolvent lambda must be positive");
  if (opts.mu * lambda >= 1.0) throw InputError("resolvent needs lambda*mu < 1");
  const Eigen::Index n = v.size();
  const double tol = opts.tol * (1.0 + v.norm());

  Vector u = opts.initial_guess ? *opts.initial_guess : v;
  require_size(u.size(), n, "resolvent initial guess");
  Vector tu(n), g(n);
  auto residual = [&](const Vector& w, Vector& out) {
    T(w, tu);
    out = w + lambda * tu - v;
    return out.norm();
  };

  double L = opts.lipschitz;
  if (!(L > 0.0)) {
    // crude local probe
    Vector t0(n), t1(n), p(n);
    T(u, t0);
    for (int k = 0; k < 4; ++k) {
      p = u;
      p[k % n] += 1e-3;
      T(p, t1);
      L = std::max(L, (t1 - t0).norm() / 1e-3);
    }
    L = std::max(L, 1e-3);
  }
  const double w = (1.0 - lambda * opts.mu) / ((1.0 + lambda * L) * (1.0 + lambda * L));

  ResolventResult res;
  double r = residual(u, g);
  Vector best = u;
  double best_r = r;
  int it = 0;
  for (; it < opts.fixed_point_iters && r > tol && std::isfinite(r); ++it) {
    u -= w * g;
    r = residual(u, g);
    if (r < best_r) {
      best_r = r;
      best = u;
    }
  }
  res.iterations = it;
  if (best_r <= tol) {
    res.u = best;
    res.residual = best_r;
    return res;
  }

  // Newton with a finite-difference Jacobian and backtracking.
  res.used_newton = true;
  u = best;
  r = residual(u, g);
  const Matrix I = Matrix::Identity(n, n);
  Vector trial(n), gt(n);
  for (int k = 0; k < opts.newton_iters && r > tol; ++k) {
    const Matrix JG = I + lambda * fd_jacobian(T, u);
    const Vector step = JG.fullPivLu().solve(g);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      trial = u - t * step;
      const double rt = residual(trial, gt);
      if (std::isfinite(rt) && rt < r) {
        u = trial;
        g = gt;
        r = rt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++res.iterations;
    if (!accepted) break;
  }
  if (!(r <= tol)) throw ConvergenceError("resolvent iteration did not converge", r);
  res.u = u;
  res.residual = r;
  return res;
}

Moduli derive_constants(const Moduli& in, DerivationRule rule, bool convex_gradient) {
  auto need = [](const std::optional<double>& v, const char* what) {
    if (!v || !(*v > 0.0)) throw InputError(std::string("derivation needs a positive ") + what);
    return *v;
  };
  Moduli out = in;
  switch (rule) {
    case DerivationRule::cocoercive_to_lipschitz:
      out.lipschitz = 1.0 / need(in.cocoercive, "cocoercivity modulus");
      break;
    case DerivationRule::lipschitz_to_cocoercive:
      if (!convex_gradient) {
        throw InputError("Lipschitz to cocoercive holds only for gradients of convex functions");
      }
      out.cocoercive = 1.0 / need(in.lipschitz, "Lipschitz modulus");
      break;
    case DerivationRule::strong_monotone_to_inv_lipschitz:
      out.inv_lipschitz = 1.0 / need(in.strong_monotone, "strong monotonicity modulus");
      break;
    case DerivationRule::inv_lipschitz_to_strong_monotone:
      if (!convex_gradient) {
        throw InputError(
            "inverse Lipschitz to strongly monotone holds only for gradients of convex functions");
      }
      out.strong_monotone = 1.0 / need(in.inv_lipschitz, "inverse-Lipschitz modulus");
      break;
    case DerivationRule::strong_monotone_lipschitz_to_cocoercive: {
      const double mu = need(in.strong_monotone, "strong monotonicity modulus");
      const double L = need(in.lipschitz, "Lipschitz modulus");
      out.cocoercive = mu / (L * L);
      break;
    }
    case DerivationRule::cocoercive_inv_lipschitz_to_strong_monotone: {
      const double C = need(in.cocoercive, "cocoercivity modulus");
      const double R = need(in.inv_lipschitz, "inverse-Lipschitz modulus");
      out.strong_monotone = C / (R * R);
      break;
    }
  }
  return out;
}

}  // namespace heavy_anchor
