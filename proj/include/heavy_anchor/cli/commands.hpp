#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "heavy_anchor/cli/config.hpp"
#include "heavy_anchor/diagnostics.hpp"
#include "heavy_anchor/game.hpp"
#include "heavy_anchor/graph.hpp"
#include "heavy_anchor/operator_analysis.hpp"
#include "heavy_anchor/param_synth.hpp"
#include "heavy_anchor/trajectory.hpp"

namespace heavy_anchor::cli {

Game make_game(const ScenarioConfig& cfg);
// Built only for info_mode = partial.
std::optional<CommGraph> make_graph(const ScenarioConfig& cfg);

SamplingOptions sampling_options(const ScenarioConfig& cfg);
// Exact for quadratic games, sampled otherwise.
OperatorConstants game_constants(const Game& game, const ScenarioConfig& cfg);

// Resolves theorem = auto from the info mode, the game structure and mu.
Theorem select_theorem(const ScenarioConfig& cfg, const Game& game, const OperatorConstants& c);

ParameterCertificate synthesize(const ScenarioConfig& cfg, const Game& game, const CommGraph* graph,
                                Theorem theorem, const OperatorConstants& c);

// Quadratic games solve A x = -b; others run Newton from the origin.
Vector find_equilibrium(const Game& game);

struct RunOutcome {
  std::optional<ParameterCertificate> certificate;  // absent for gradient play
  bool certified = false;  // parameters inside the certificate's ranges
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> c;
  Vector equilibrium;
  Trajectory trajectory;
  ConvergenceVerdict verdict;
  std::optional<MonotonicityReport> lyapunov;
  RateEstimate rate;
  io::json summary;
};

RunOutcome run_scenario(const ScenarioConfig& cfg);

// Writes CSV, summary and plot data as enabled in cfg.output. Returns the
// paths written.
std::vector<std::string> write_outputs(const ScenarioConfig& cfg, const RunOutcome& run,
                                       const Game& game);

int cmd_analyze(const ScenarioConfig& cfg, std::ostream& out);
int cmd_synth(const ScenarioConfig& cfg, std::ostream& out);
int cmd_simulate(const ScenarioConfig& cfg, std::ostream& out);
// simulate plus pass/fail on certification, convergence and Lyapunov decrease.
int cmd_verify(const ScenarioConfig& cfg, std::ostream& out);

}  // namespace heavy_anchor::cli
