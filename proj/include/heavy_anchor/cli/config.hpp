#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "heavy_anchor/cli/serialize.hpp"
#include "heavy_anchor/graph.hpp"
#include "heavy_anchor/kernels.hpp"
#include "heavy_anchor/param_synth.hpp"

namespace heavy_anchor::cli {

// Malformed config or command line; maps to exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitCode : int { ok = 0, usage = 1, infeasible = 2, verification_failed = 3 };

struct GameRef {
  std::string fixture = "harmonic";  // fixture or registered plugin name
  std::optional<QuadraticGame> quadratic;
};

struct ScenarioConfig {
  GameRef game;
  GraphSpec graph;
  std::string info_mode = "full";   // full | partial
  std::string theorem = "auto";     // auto | full-monotone | ... | dist-quad
  std::string dynamics = "anchor";  // anchor | gradient

  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> c;
  double c_factor = 1.01;
  double d = 0.5;
  std::string alpha_variant = "single-agent";  // single-agent | per-agent
  bool force = false;

  double T = 20.0;
  std::optional<double> h;
  double stiffness_factor = 1.0;
  std::optional<std::uint64_t> max_steps;
  std::uint64_t decimation = 0;
  std::uint64_t max_samples = 2000;

  std::uint64_t seed = 1;
  double init_low = -10.0;
  double init_high = 10.0;
  std::optional<Vector> x0;
  std::optional<Vector> r0;

  std::uint64_t sample_pairs = 100000;
  std::uint64_t sample_seed = 1;
  double sample_low = -10.0;
  double sample_high = 10.0;
  double local_fraction = 0.5;

  double tol_residual = 1e-3;
  double tol_consensus = 1e-3;
  double lyapunov_slack = 1e-8;

  std::string out_dir = ".";
  std::string prefix = "run";
  bool write_csv = true;
  bool write_summary = true;
  bool write_plot = true;

  kernels::Exec exec = kernels::Exec::serial;
};

io::json config_to_json(const ScenarioConfig& cfg);
// Unknown keys and type errors are reported with their field path.
ScenarioConfig config_from_json(const io::json& j);
ScenarioConfig load_config(const std::string& path);

}  // namespace heavy_anchor::cli
