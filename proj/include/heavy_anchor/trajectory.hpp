#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heavy_anchor/common.hpp"

namespace heavy_anchor {

struct DiagnosticSample {
  double t = 0.0;
  double ne_residual = 0.0;      // |F(x)|, or |F(R x)| for stacked estimates
  double consensus_error = 0.0;  // |Pi_perp x|, zero in full information
  std::optional<double> lyapunov;
};

struct Trajectory {
  std::string dynamics;  // gradient | anchor | anchor-distributed
  std::string method = "rk4";
  double h = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t decimation = 1;
  std::uint64_t seed = 0;
  int n_agents = 1;
  Eigen::Index dim = 0;
  bool distributed = false;

  std::vector<double> times;
  std::vector<Vector> x;  // n, or N*n when distributed
  std::vector<Vector> r;  // empty for gradient play
  std::vector<DiagnosticSample> diagnostics;

  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;
  double wall_time = 0.0;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

}  // namespace heavy_anchor
