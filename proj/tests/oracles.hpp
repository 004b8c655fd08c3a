#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

// P M + M^T P = -Q through the vectorized (Kronecker) system.
inline MatrixXd lyapunov_kron(const MatrixXd& M, const MatrixXd& Q) {
  const Eigen::Index n = M.rows();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd K = Eigen::kroneckerProduct(I, M.transpose()).eval() +
                     Eigen::kroneckerProduct(M.transpose(), I).eval();
  const VectorXd rhs = -Eigen::Map<const VectorXd>(Q.data(), n * n);
  const VectorXd vp = K.fullPivLu().solve(rhs);
  MatrixXd P = Eigen::Map<const MatrixXd>(vp.data(), n, n);
  return 0.5 * (P + P.transpose());
}

inline std::vector<cd> eigenvalues(const MatrixXd& M) {
  Eigen::EigenSolver<MatrixXd> es(M, false);
  std::vector<cd> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

inline double spectral_abscissa(const MatrixXd& M) {
  double a = -INFINITY;
  for (const cd& z : eigenvalues(M)) a = std::max(a, z.real());
  return a;
}

// Greedy matching distance between two multisets of complex numbers.
inline double multiset_distance(std::vector<cd> a, std::vector<cd> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const cd& z : a) {
    auto best = b.begin();
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (std::abs(*it - z) < std::abs(*best - z)) best = it;
    }
    worst = std::max(worst, std::abs(*best - z));
    b.erase(best);
  }
  return worst;
}

// Roots of z^2 + p z + q from the companion matrix.
inline std::vector<cd> quadratic_roots(cd p, cd q) {
  Eigen::Matrix2cd C;
  C << -p, -q, 1.0, 0.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(C);
  return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

// Eigenvalues of the weighted ring Laplacian (circulant).
inline double ring_lambda2(int n, double w = 1.0) {
  return 2.0 * w * (1.0 - std::cos(2.0 * M_PI / n));
}
inline double path_lambda2(int n, double w = 1.0) { return 2.0 * w * (1.0 - std::cos(M_PI / n)); }

inline double largest_singular(const MatrixXd& A) {
  Eigen::EigenSolver<MatrixXd> es(A.transpose() * A, false);
  double m = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) m = std::max(m, es.eigenvalues()(i).real());
  return std::sqrt(m);
}
inline double smallest_singular(const MatrixXd& A) {
  Eigen::EigenSolver<MatrixXd> es(A.transpose() * A, false);
  double m = INFINITY;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) m = std::min(m, es.eigenvalues()(i).real());
  return std::sqrt(std::max(0.0, m));
}
// -min eig of the symmetric part, via the general eigensolver.
inline double hypomonotone_modulus(const MatrixXd& A) {
  const MatrixXd S = 0.5 * (A + A.transpose());
  double m = INFINITY;
  for (const cd& z : eigenvalues(S)) m = std::min(m, z.real());
  return std::max(0.0, -m);
}

// Agent i's partial gradient in the ring fixtures: w_i B x_partner.
inline VectorXd ring_pseudo_gradient(const std::vector<double>& w, const VectorXd& x) {
  const int N = static_cast<int>(w.size());
  Eigen::Matrix2d B;
  B << 5, 1, -1, 5;
  VectorXd F(2 * N);
  for (int i = 0; i < N; ++i) {
    const int p = N - 1 - i;
    F.segment<2>(2 * i) = w[static_cast<std::size_t>(i)] * (B * x.segment<2>(2 * p));
  }
  return F;
}

// Dense generator of the distributed anchored dynamics for F(x) = A x,
// built entry by entry: d/dt [x; r] = G [x; r].
inline MatrixXd distributed_generator(const MatrixXd& A, const std::vector<int>& dims,
                                      const MatrixXd& Lap, double alpha, double beta, double c) {
  const int N = static_cast<int>(dims.size());
  const Eigen::Index n = A.rows();
  const Eigen::Index m = N * n;
  MatrixXd G = MatrixXd::Zero(2 * m, 2 * m);
  Eigen::Index off = 0;
  for (int i = 0; i < N; ++i) {
    for (int a = 0; a < dims[static_cast<std::size_t>(i)]; ++a) {
      const Eigen::Index row = i * n + off + a;
      for (Eigen::Index k = 0; k < n; ++k) G(row, i * n + k) -= A(off + a, k);
    }
    off += dims[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    G(k, k) -= beta;
    G(k, m + k) += beta;
    G(m + k, k) += alpha;
    G(m + k, m + k) -= alpha;
  }
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) G(i * n + k, j * n + k) -= c * Lap(i, j);
    }
  }
  return G;
}

inline VectorXd flow(const MatrixXd& G, const VectorXd& w0, double t) {
  const MatrixXd E = (G * t).exp();
  return E * w0;
}

// Plain OGDA recursion on a gradient field.
template <class Grad>
std::vector<VectorXd> ogda(Grad grad, VectorXd x0, VectorXd xm1, double s, int iters) {
  std::vector<VectorXd> xs{xm1, x0};
  for (int k = 0; k < iters; ++k) {
    const VectorXd& xk = xs[xs.size() - 1];
    const VectorXd& xp = xs[xs.size() - 2];
    VectorXd g = grad(xk);
    VectorXd gp = grad(xp);
    xs.push_back(xk - s * g + 0.5 * s * gp);
  }
  return xs;
}

}  // namespace oracle
