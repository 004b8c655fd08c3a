#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heavy_anchor/common.hpp"

namespace heavy_anchor {

// F(x) = A x + b. Row block i of A is agent i's Q_i.
struct QuadraticGame {
  Matrix A;
  Vector b;
  std::vector<int> dims;

  Eigen::Index dim() const { return A.rows(); }
  void validate() const;
};

// A game seen only through its partial gradients. The full-information
// pseudo-gradient is the estimate evaluation at consensus, so the two can
// never disagree.
class Game {
 public:
  // Writes agent `agent`'s partial gradient, evaluated at a length-n estimate
  // of the whole action profile, into `out` (length dims[agent]).
  using PartialGradientFn = std::function<void(int agent, const Eigen::Ref<const Vector>& estimate,
                                               Eigen::Ref<Vector> out)>;

  Game(std::string name, std::vector<int> dims, PartialGradientFn partial);
  static Game from_quadratic(std::string name, QuadraticGame qg);

  const std::string& name() const { return name_; }
  int n_agents() const { return static_cast<int>(dims_.size()); }
  Eigen::Index dim() const { return dim_; }
  const std::vector<int>& dims() const { return dims_; }
  Eigen::Index offset(int agent) const { return offsets_[static_cast<std::size_t>(agent)]; }
  int agent_dim(int agent) const { return dims_[static_cast<std::size_t>(agent)]; }
  const QuadraticGame* quadratic() const { return quadratic_ ? &*quadratic_ : nullptr; }

  Vector pseudo_gradient(const Vector& x) const;
  void pseudo_gradient_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;

  Vector partial_gradient(int agent, const Vector& estimate) const;
  void partial_gradient_into(int agent, const Eigen::Ref<const Vector>& estimate,
                             Eigen::Ref<Vector> out) const;

  // Bold F: agent i's partial gradient at its own estimate block x^i.
  // Input length N*n, output length n.
  Vector extended_pseudo_gradient(const Vector& stacked) const;
  void extended_pseudo_gradient_into(const Eigen::Ref<const Vector>& stacked,
                                     Eigen::Ref<Vector> out) const;

 private:
  std::string name_;
  std::vector<int> dims_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index dim_ = 0;
  PartialGradientFn partial_;
  std::optional<QuadraticGame> quadratic_;
};

// The row-selection structure R = diag(R_i).
class Selection {
 public:
  explicit Selection(std::vector<int> dims);

  int n_agents() const { return static_cast<int>(dims_.size()); }
  Eigen::Index dim() const { return dim_; }

  // R x: agent i's own block out of its estimate x^i.
  Vector select(const Vector& stacked) const;
  // R^T x: x_i into slot i of estimate i, zeros elsewhere.
  Vector scatter(const Vector& actions) const;
  Matrix matrix() const;

 private:
  std::vector<int> dims_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index dim_ = 0;
};

// 1_N (x) x
Vector consensus_lift(int n_agents, const Vector& x);

// Stacked estimates and auxiliary estimates, both of length N*n.
struct EstimateState {
  Vector x;
  Vector r;

  static EstimateState at_consensus(int n_agents, const Vector& x, const Vector& r);
  void validate(int n_agents, Eigen::Index dim) const;
};

// Solves F(x*) = 0. Throws SingularSystemError with the numerical rank when A
// is singular.
Vector solve_quadratic_ne(const QuadraticGame& qg);

// Fixtures: harmonic, g1, g2, g3, sine.
Game build_benchmark(const std::string& name);
const std::vector<std::string>& benchmark_names();
// Coupling weights of the ring fixtures (g1/g2/g3; sine uses g1's).
std::vector<double> benchmark_weights(const std::string& name);

// In-process plugin registry; resolve_game checks fixtures first.
void register_game(const std::string& name, std::function<Game()> factory);
Game resolve_game(const std::string& name);

}  // namespace heavy_anchor
