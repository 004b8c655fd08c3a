#pragma once

#include <string>
#include <vector>

#include "heavy_anchor/common.hpp"

namespace heavy_anchor {

class DisconnectedGraphError : public std::runtime_error {
 public:
  DisconnectedGraphError(const std::string& what, std::vector<std::vector<int>> components)
      : std::runtime_error(what), components_(std::move(components)) {}
  const std::vector<std::vector<int>>& components() const { return components_; }

 private:
  std::vector<std::vector<int>> components_;
};

// Undirected weighted communication graph. W is symmetric, nonnegative, with
// a zero diagonal.
class CommGraph {
 public:
  explicit CommGraph(Matrix weights);

  static CommGraph ring(int n, double weight = 1.0);
  static CommGraph complete(int n, double weight = 1.0);
  static CommGraph path(int n, double weight = 1.0);

  int size() const { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }

  struct Edge {
    int to;
    double weight;
  };
  const std::vector<std::vector<Edge>>& neighbors() const { return neighbors_; }

  std::vector<std::vector<int>> components() const;
  bool connected() const { return components().size() == 1; }

 private:
  Matrix weights_;
  std::vector<std::vector<Edge>> neighbors_;
};

// L = Deg - W
Matrix laplacian(const CommGraph& g);

struct LaplacianSpectrum {
  Vector eigenvalues;  // ascending
  double lambda2 = 0;  // 0 when disconnected
};

LaplacianSpectrum laplacian_spectrum(const CommGraph& g);

// Algebraic connectivity. Throws DisconnectedGraphError naming the components.
double lambda2(const CommGraph& g);
double lambda_max(const CommGraph& g);

// Matrix-free application of L (x) I_n.
class LiftedLaplacian {
 public:
  LiftedLaplacian(const CommGraph& g, Eigen::Index block_dim);

  Eigen::Index block_dim() const { return block_dim_; }
  int n_nodes() const { return static_cast<int>(neighbors_.size()); }

  void apply(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;
  Vector apply(const Vector& x) const;
  Matrix dense() const;

  const std::vector<std::vector<CommGraph::Edge>>& neighbors() const { return neighbors_; }
  const std::vector<double>& degrees() const { return degrees_; }

 private:
  Eigen::Index block_dim_;
  std::vector<std::vector<CommGraph::Edge>> neighbors_;
  std::vector<double> degrees_;
  Matrix laplacian_;
};

// Consensus projection helpers on stacked N*n vectors.
Vector consensus_average(const Vector& stacked, int n_agents);       // (1/N) sum_i x^i
Vector project_parallel(const Vector& stacked, int n_agents);        // Pi_par x
Vector project_orthogonal(const Vector& stacked, int n_agents);      // Pi_perp x

// Graph description used by scenario configs: ring | complete | path | custom.
struct GraphSpec {
  std::string type = "ring";
  int n = 10;
  double weight = 1.0;
  Matrix custom_weights;
};

CommGraph build_graph(const GraphSpec& spec);

}  // namespace heavy_anchor
