#include "heavy_anchor/game.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace heavy_anchor {

namespace {

std::vector<Eigen::Index> prefix_offsets(const std::vector<int>& dims, Eigen::Index* total) {
  if (dims.empty()) throw InputError("game needs at least one agent");
  std::vector<Eigen::Index> offsets(dims.size());
  Eigen::Index acc = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) throw InputError("agent action dimension must be >= 1");
    offsets[i] = acc;
    acc += dims[i];
  }
  *total = acc;
  return offsets;
}

constexpr int kRingAgents = 10;

Matrix coupling_block() {
  Matrix B(2, 2);
  B << 5, 1, -1, 5;
  return B;
}

QuadraticGame ring_quadratic(const std::vector<double>& w) {
  const int n_agents = static_cast<int>(w.size());
  QuadraticGame qg;
  qg.dims.assign(w.size(), 2);
  qg.A = Matrix::Zero(2 * n_agents, 2 * n_agents);
  qg.b = Vector::Zero(2 * n_agents);
  const Matrix B = coupling_block();
  for (int i = 0; i < n_agents; ++i) {
    const int partner = n_agents - 1 - i;
    qg.A.block(2 * i, 2 * partner, 2, 2) = w[static_cast<std::size_t>(i)] * B;
  }
  return qg;
}

Game sine_game() {
  const std::vector<double> w = benchmark_weights("g1");
  const int n_agents = static_cast<int>(w.size());
  std::vector<int> dims(w.size(), 2);
  auto partial = [w, n_agents](int agent, const Eigen::Ref<const Vector>& est,
                               Eigen::Ref<Vector> out) {
    const int partner = n_agents - 1 - agent;
    const double y1 = est[2 * partner];
    const double y2 = est[2 * partner + 1];
    const double wi = w[static_cast<std::size_t>(agent)];
    out[0] = wi * (5.0 * y1 + std::sin(y2));
    out[1] = wi * (5.0 * y2 - std::sin(y1));
  };
  return Game("sine", std::move(dims), partial);
}

std::map<std::string, std::function<Game()>>& registry() {
  static std::map<std::string, std::function<Game()>> r;
  return r;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void QuadraticGame::validate() const {
  if (A.rows() != A.cols()) throw InputError("quadratic game: A must be square");
  require_size(b.size(), A.rows(), "quadratic game offset b");
  const auto total = std::accumulate(dims.begin(), dims.end(), Eigen::Index{0});
  if (dims.empty() || total != A.rows()) {
    throw InputError("quadratic game: dims must sum to the size of A");
  }
  for (int d : dims) {
    if (d < 1) throw InputError("quadratic game: agent dimension must be >= 1");
  }
}

Game::Game(std::string name, std::vector<int> dims, PartialGradientFn partial)
    : name_(std::move(name)), dims_(std::move(dims)), partial_(std::move(partial)) {
  offsets_ = prefix_offsets(dims_, &dim_);
  if (!partial_) throw InputError("game needs a partial-gradient callback");
}

Game Game::from_quadratic(std::string name, QuadraticGame qg) {
  qg.validate();
  auto shared = std::make_shared<const QuadraticGame>(qg);
  std::vector<Eigen::Index> offsets;
  Eigen::Index total = 0;
  offsets = prefix_offsets(qg.dims, &total);
  auto partial = [shared, offsets](int agent, const Eigen::Ref<const Vector>& est,
                                   Eigen::Ref<Vector> out) {
    const auto a = static_cast<std::size_t>(agent);
    const Eigen::Index rows = shared->dims[a];
    out.noalias() = shared->A.middleRows(offsets[a], rows) * est;
    out += shared->b.segment(offsets[a], rows);
  };
  Game g(std::move(name), qg.dims, partial);
  g.quadratic_ = std::move(qg);
  return g;
}

void Game::partial_gradient_into(int agent, const Eigen::Ref<const Vector>& estimate,
                                 Eigen::Ref<Vector> out) const {
  partial_(agent, estimate, out);
}

Vector Game::partial_gradient(int agent, const Vector& estimate) const {
  if (agent < 0 || agent >= n_agents()) throw InputError("agent index out of range");
  require_size(estimate.size(), dim_, "partial_gradient estimate");
  Vector out(agent_dim(agent));
  partial_(agent, estimate, out);
  return out;
}

void Game::pseudo_gradient_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
  if (quadratic_) {
    out.noalias() = quadratic_->A * x;
    out += quadratic_->b;
    return;
  }
  for (int i = 0; i < n_agents(); ++i) {
    partial_(i, x, out.segment(offset(i), agent_dim(i)));
  }
}

Vector Game::pseudo_gradient(const Vector& x) const {
  require_size(x.size(), dim_, "pseudo_gradient input");
  Vector out(dim_);
  pseudo_gradient_into(x, out);
  return out;
}

void Game::extended_pseudo_gradient_into(const Eigen::Ref<const Vector>& stacked,
                                         Eigen::Ref<Vector> out) const {
  for (int i = 0; i < n_agents(); ++i) {
    partial_(i, stacked.segment(static_cast<Eigen::Index>(i) * dim_, dim_),
             out.segment(offset(i), agent_dim(i)));
  }
}

Vector Game::extended_pseudo_gradient(const Vector& stacked) const {
  require_size(stacked.size(), dim_ * n_agents(), "extended_pseudo_gradient input");
  Vector out(dim_);
  extended_pseudo_gradient_into(stacked, out);
  return out;
}

Selection::Selection(std::vector<int> dims) : dims_(std::move(dims)) {
  offsets_ = prefix_offsets(dims_, &dim_);
}

Vector Selection::select(const Vector& stacked) const {
  require_size(stacked.size(), dim_ * n_agents(), "selection input");
  Vector x(dim_);
  for (int i = 0; i < n_agents(); ++i) {
    const auto a = static_cast<std::size_t>(i);
    x.segment(offsets_[a], dims_[a]) = stacked.segment(i * dim_ + offsets_[a], dims_[a]);
  }
  return x;
}

Vector Selection::scatter(const Vector& actions) const {
  require_size(actions.size(), dim_, "scatter input");
  Vector stacked = Vector::Zero(dim_ * n_agents());
  for (int i = 0; i < n_agents(); ++i) {
    const auto a = static_cast<std::size_t>(i);
    stacked.segment(i * dim_ + offsets_[a], dims_[a]) = actions.segment(offsets_[a], dims_[a]);
  }
  return stacked;
}

Matrix Selection::matrix() const {
  Matrix R = Matrix::Zero(dim_, dim_ * n_agents());
  for (int i = 0; i < n_agents(); ++i) {
    const auto a = static_cast<std::size_t>(i);
    R.block(offsets_[a], i * dim_ + offsets_[a], dims_[a], dims_[a]).setIdentity();
  }
  return R;
}

Vector consensus_lift(int n_agents, const Vector& x) {
  if (n_agents < 1) throw InputError("consensus_lift needs N >= 1");
  return x.replicate(n_agents, 1);
}

EstimateState EstimateState::at_consensus(int n_agents, const Vector& x, const Vector& r) {
  require_size(r.size(), x.size(), "at_consensus r");
  return {consensus_lift(n_agents, x), consensus_lift(n_agents, r)};
}

void EstimateState::validate(int n_agents, Eigen::Index dim) const {
  require_size(x.size(), dim * n_agents, "estimate state x");
  require_size(r.size(), dim * n_agents, "estimate state r");
}

Vector solve_quadratic_ne(const QuadraticGame& qg) {
  qg.validate();
  Eigen::FullPivLU<Matrix> lu(qg.A);
  if (!lu.isInvertible()) {
    throw SingularSystemError("A is singular (rank " + std::to_string(lu.rank()) + " of " +
                                  std::to_string(qg.A.rows()) +
                                  "): equilibrium is not unique or does not exist",
                              lu.rank(), qg.A.rows());
  }
  Vector x = lu.solve(-qg.b);
  // one step of iterative refinement
  const Vector res = qg.A * x + qg.b;
  x -= lu.solve(res);
  const double tol = 1e-10 * (1.0 + qg.b.norm());
  const double final_res = (qg.A * x + qg.b).norm();
  if (!(final_res <= tol)) {
    throw ConvergenceError("equilibrium solve residual above tolerance (ill-conditioned A)",
                           final_res);
  }
  return x;
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"harmonic", "g1", "g2", "g3", "sine"};
  return names;
}

std::vector<double> benchmark_weights(const std::string& name) {
  if (name == "g1" || name == "sine") return {1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
  if (name == "g2") {
    std::vector<double> w(kRingAgents);
    for (int i = 0; i < kRingAgents; ++i) w[static_cast<std::size_t>(i)] = (-9.0 + 2.0 * i) / 9.0;
    return w;
  }
  if (name == "g3") return {-2, -1, -1, -1, -1, 1, 1, 1, 1, 2};
  throw InputError("no ring weights for fixture '" + name + "'");
}

Game build_benchmark(const std::string& name) {
  if (name == "harmonic") {
    QuadraticGame qg;
    qg.A = Matrix(2, 2);
    qg.A << 0, 1, -1, 0;
    qg.b = Vector::Zero(2);
    qg.dims = {1, 1};
    return Game::from_quadratic("harmonic", std::move(qg));
  }
  if (name == "g1" || name == "g2" || name == "g3") {
    return Game::from_quadratic(name, ring_quadratic(benchmark_weights(name)));
  }
  if (name == "sine") return sine_game();
  throw InputError("unknown benchmark '" + name + "' (expected harmonic|g1|g2|g3|sine)");
}

void register_game(const std::string& name, std::function<Game()> factory) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[name] = std::move(factory);
}

Game resolve_game(const std::string& name) {
  for (const auto& b : benchmark_names()) {
    if (b == name) return build_benchmark(name);
  }
  std::function<Game()> factory;
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(name);
    if (it != registry().end()) factory = it->second;
  }
  if (!factory) throw InputError("unknown game '" + name + "'");
  return factory();
}

}  // namespace heavy_anchor
