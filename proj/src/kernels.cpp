#include "heavy_anchor/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "heavy_anchor/game.hpp"
#include "heavy_anchor/graph.hpp"

namespace heavy_anchor::kernels {

const char* to_string(Exec e) { return e == Exec::serial ? "serial" : "parallel"; }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

void laplacian_row(const LiftedLaplacian& op, const Eigen::Ref<const Vector>& x,
                   Eigen::Ref<Vector> out, int i) {
  const Eigen::Index n = op.block_dim();
  auto yi = out.segment(i * n, n);
  yi = op.degrees()[static_cast<std::size_t>(i)] * x.segment(i * n, n);
  for (const auto& e : op.neighbors()[static_cast<std::size_t>(i)]) {
    yi -= e.weight * x.segment(e.to * n, n);
  }
}

}  // namespace

void lifted_laplacian_apply(const LiftedLaplacian& op, const Eigen::Ref<const Vector>& x,
                            Eigen::Ref<Vector> out, Exec exec) {
  const int N = op.n_nodes();
  require_size(x.size(), op.block_dim() * N, "lifted Laplacian input");
  require_size(out.size(), op.block_dim() * N, "lifted Laplacian output");
  if (exec == Exec::serial) {
    for (int i = 0; i < N; ++i) laplacian_row(op, x, out, i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < N; ++i) laplacian_row(op, x, out, i);
}

void extended_pseudo_gradient(const Game& game, const Eigen::Ref<const Vector>& stacked,
                              Eigen::Ref<Vector> out, Exec exec) {
  const int N = game.n_agents();
  const Eigen::Index n = game.dim();
  require_size(stacked.size(), n * N, "extended pseudo-gradient input");
  require_size(out.size(), n, "extended pseudo-gradient output");
  if (exec == Exec::serial) {
    game.extended_pseudo_gradient_into(stacked, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < N; ++i) {
    game.partial_gradient_into(i, stacked.segment(i * n, n),
                               out.segment(game.offset(i), game.agent_dim(i)));
  }
}

void PairExtremes::add(const Eigen::Ref<const Vector>& dx, const Eigen::Ref<const Vector>& dT) {
  const double nx2 = dx.squaredNorm();
  if (!(nx2 > 0.0) || !std::isfinite(nx2)) {
    ++skipped;
    return;
  }
  const double nx = std::sqrt(nx2);
  const double nT = dT.norm();
  if (!std::isfinite(nT)) {
    ++skipped;
    return;
  }
  ++used;
  neg_monotone = std::max(neg_monotone, -dT.dot(dx) / nx2);
  lipschitz = std::max(lipschitz, nT / nx);
  if (nT > 0.0) {
    inv_lipschitz = std::max(inv_lipschitz, nx / nT);
  } else {
    unbounded_inverse = true;
  }
}

void PairExtremes::merge(const PairExtremes& o) {
  neg_monotone = std::max(neg_monotone, o.neg_monotone);
  lipschitz = std::max(lipschitz, o.lipschitz);
  inv_lipschitz = std::max(inv_lipschitz, o.inv_lipschitz);
  used += o.used;
  skipped += o.skipped;
  unbounded_inverse = unbounded_inverse || o.unbounded_inverse;
}

}  // namespace heavy_anchor::kernels
