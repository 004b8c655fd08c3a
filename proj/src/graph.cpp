#include "heavy_anchor/graph.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "heavy_anchor/game.hpp"
#include "heavy_anchor/kernels.hpp"

namespace heavy_anchor {

CommGraph::CommGraph(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols() || weights_.rows() < 1) {
    throw InputError("graph weights must be a nonempty square matrix");
  }
  const int n = size();
  neighbors_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) throw InputError("graph weights must have a zero diagonal");
    for (int j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!(w >= 0.0)) throw InputError("graph weights must be nonnegative");
      if (w != weights_(j, i)) throw InputError("graph weights must be symmetric (W = W^T)");
      if (w > 0.0 && i != j) neighbors_[static_cast<std::size_t>(i)].push_back({j, w});
    }
  }
}

CommGraph CommGraph::ring(int n, double weight) {
  if (n < 2) throw InputError("ring needs at least 2 nodes");
  Matrix W = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    W(i, j) = weight;
    W(j, i) = weight;
  }
  return CommGraph(std::move(W));
}

CommGraph CommGraph::complete(int n, double weight) {
  if (n < 1) throw InputError("complete graph needs at least 1 node");
  Matrix W = Matrix::Constant(n, n, weight);
  W.diagonal().setZero();
  return CommGraph(std::move(W));
}

CommGraph CommGraph::path(int n, double weight) {
  if (n < 1) throw InputError("path needs at least 1 node");
  Matrix W = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    W(i, i + 1) = weight;
    W(i + 1, i) = weight;
  }
  return CommGraph(std::move(W));
}

std::vector<std::vector<int>> CommGraph::components() const {
  const int n = size();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<int> stack = {s};
    label[static_cast<std::size_t>(s)] = id;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      comps.back().push_back(u);
      for (const auto& e : neighbors_[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(e.to)] < 0) {
          label[static_cast<std::size_t>(e.to)] = id;
          stack.push_back(e.to);
        }
      }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

Matrix laplacian(const CommGraph& g) {
  Matrix L = -g.weights();
  L.diagonal() = g.weights().rowwise().sum();
  return L;
}

LaplacianSpectrum laplacian_spectrum(const CommGraph& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(laplacian(g), Eigen::EigenvaluesOnly);
  LaplacianSpectrum s;
  s.eigenvalues = es.eigenvalues();
  if (g.connected() && s.eigenvalues.size() > 1) {
    s.lambda2 = s.eigenvalues[1];
  } else {
    s.lambda2 = 0.0;
  }
  return s;
}

double lambda2(const CommGraph& g) {
  const auto comps = g.components();
  if (comps.size() != 1) {
    std::string msg = "graph is disconnected with " + std::to_string(comps.size()) +
                      " components:";
    for (const auto& c : comps) {
      msg += " {";
      for (std::size_t k = 0; k < c.size(); ++k) msg += (k ? "," : "") + std::to_string(c[k]);
      msg += "}";
    }
    throw DisconnectedGraphError(msg, comps);
  }
  if (g.size() == 1) throw InputError("lambda2 needs at least 2 nodes");
  return laplacian_spectrum(g).lambda2;
}

double lambda_max(const CommGraph& g) {
  return laplacian_spectrum(g).eigenvalues.maxCoeff();
}

LiftedLaplacian::LiftedLaplacian(const CommGraph& g, Eigen::Index block_dim)
    : block_dim_(block_dim), neighbors_(g.neighbors()), laplacian_(laplacian(g)) {
  if (block_dim < 1) throw InputError("lifted Laplacian block dimension must be >= 1");
  degrees_.resize(neighbors_.size());
  for (std::size_t i = 0; i < neighbors_.size(); ++i) degrees_[i] = laplacian_(i, i);
}

void LiftedLaplacian::apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  kernels::lifted_laplacian_apply(*this, x, out, kernels::Exec::serial);
}

Vector LiftedLaplacian::apply(const Vector& x) const {
  require_size(x.size(), block_dim_ * n_nodes(), "lifted Laplacian input");
  Vector out(x.size());
  apply(x, out);
  return out;
}

Matrix LiftedLaplacian::dense() const {
  const Eigen::Index n = block_dim_;
  Matrix K = Matrix::Zero(laplacian_.rows() * n, laplacian_.cols() * n);
  for (Eigen::Index i = 0; i < laplacian_.rows(); ++i) {
    for (Eigen::Index j = 0; j < laplacian_.cols(); ++j) {
      if (laplacian_(i, j) != 0.0) {
        K.block(i * n, j * n, n, n).diagonal().setConstant(laplacian_(i, j));
      }
    }
  }
  return K;
}

Vector consensus_average(const Vector& stacked, int n_agents) {
  if (n_agents < 1 || stacked.size() % n_agents != 0) {
    throw InputError("stacked vector length is not a multiple of N");
  }
  const Eigen::Index n = stacked.size() / n_agents;
  return stacked.reshaped(n, n_agents).rowwise().mean();
}

Vector project_parallel(const Vector& stacked, int n_agents) {
  return consensus_lift(n_agents, consensus_average(stacked, n_agents));
}

Vector project_orthogonal(const Vector& stacked, int n_agents) {
  return stacked - project_parallel(stacked, n_agents);
}

CommGraph build_graph(const GraphSpec& spec) {
  if (spec.type == "ring") return CommGraph::ring(spec.n, spec.weight);
  if (spec.type == "complete") return CommGraph::complete(spec.n, spec.weight);
  if (spec.type == "path") return CommGraph::path(spec.n, spec.weight);
  if (spec.type == "custom") return CommGraph(spec.custom_weights);
  throw InputError("unknown graph type '" + spec.type + "' (expected ring|complete|path|custom)");
}

}  // namespace heavy_anchor
