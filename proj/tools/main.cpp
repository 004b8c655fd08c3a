#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "heavy_anchor/cli/commands.hpp"
#include "heavy_anchor/cli/config.hpp"
#include "heavy_anchor/cli/table.hpp"

using namespace heavy_anchor;
using namespace heavy_anchor::cli;

namespace {

struct Overrides {
  std::string config_path;
  std::string game;
  std::string graph;
  std::optional<int> nodes;
  std::string info;
  std::string theorem;
  std::string dynamics;
  std::optional<double> alpha, beta, c, d, T, h;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string prefix;
  bool force = false;
  bool parallel = false;
  bool print_config = false;
};

void add_scenario_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("game", o.game, "Fixture or registered game name");
  cmd->add_option("--config", o.config_path, "Scenario config file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--graph", o.graph, "Graph type: ring | complete | path");
  cmd->add_option("--nodes", o.nodes, "Graph size");
  cmd->add_option("--info", o.info, "Information setting: full | partial");
  cmd->add_option("--theorem", o.theorem, "auto | full-monotone | full-hypo | full-quad | dist-general | dist-quad");
  cmd->add_option("--dynamics", o.dynamics, "anchor | gradient");
  cmd->add_option("--alpha", o.alpha, "Override alpha");
  cmd->add_option("--beta", o.beta, "Override beta");
  cmd->add_option("--c", o.c, "Override the consensus gain");
  cmd->add_option("-d", o.d, "Override d");
  cmd->add_option("--horizon,-T", o.T, "Integration horizon");
  cmd->add_option("--step", o.h, "Fixed RK4 step");
  cmd->add_option("--seed", o.seed, "Initial-condition seed");
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--prefix", o.prefix, "Output file prefix");
  cmd->add_flag("--force", o.force, "Accept overrides outside certified ranges");
  cmd->add_flag("--parallel", o.parallel, "Use the OpenMP kernels");
  cmd->add_flag("--print-config", o.print_config, "Print the resolved config with all defaults and exit");
}

ScenarioConfig resolve(const Overrides& o) {
  ScenarioConfig cfg = o.config_path.empty() ? ScenarioConfig{} : load_config(o.config_path);
  if (!o.game.empty()) {
    cfg.game.fixture = o.game;
    cfg.game.quadratic.reset();
  }
  if (!o.graph.empty()) cfg.graph.type = o.graph;
  if (o.nodes) cfg.graph.n = *o.nodes;
  if (!o.info.empty()) {
    if (o.info != "full" && o.info != "partial") throw UsageError("--info: expected full or partial");
    cfg.info_mode = o.info;
  }
  if (!o.theorem.empty()) {
    if (o.theorem != "auto") {
      try {
        theorem_from_string(o.theorem);
      } catch (const InputError& e) {
        throw UsageError(std::string("--theorem: ") + e.what());
      }
    }
    cfg.theorem = o.theorem;
  }
  if (!o.dynamics.empty()) {
    if (o.dynamics != "anchor" && o.dynamics != "gradient") {
      throw UsageError("--dynamics: expected anchor or gradient");
    }
    cfg.dynamics = o.dynamics;
  }
  if (o.alpha) cfg.alpha = o.alpha;
  if (o.beta) cfg.beta = o.beta;
  if (o.c) cfg.c = o.c;
  if (o.d) cfg.d = *o.d;
  if (o.T) cfg.T = *o.T;
  if (o.h) cfg.h = o.h;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.prefix.empty()) cfg.prefix = o.prefix;
  if (o.force) cfg.force = true;
  if (o.parallel) cfg.exec = kernels::Exec::parallel;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy Anchor Nash-equilibrium seeking: analysis, synthesis and simulation"};
  app.require_subcommand(1);

  Overrides o;
  auto* analyze = app.add_subcommand("analyze", "Operator constants and resolvent feasibility");
  auto* synth = app.add_subcommand("synth", "Synthesize a parameter certificate");
  auto* simulate = app.add_subcommand("simulate", "Integrate the dynamics and write outputs");
  auto* verify = app.add_subcommand("verify", "Simulate and check convergence and Lyapunov decrease");
  for (auto* cmd : {analyze, synth, simulate, verify}) add_scenario_flags(cmd, o);

  auto* table = app.add_subcommand("reproduce-table", "Recompute the parameter table and diff it");
  bool table_json = false;
  bool no_sine = false;
  TableOptions topts;
  table->add_flag("--json", table_json, "JSON output");
  table->add_flag("--no-sine", no_sine, "Skip the sampled nonquadratic row");
  table->add_option("--pairs", topts.sampling.pairs, "Sample pairs for the sine constants");
  table->add_option("--sample-seed", topts.sampling.seed, "Sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ExitCode::ok : ExitCode::usage;
  }

  try {
    if (table->parsed()) {
      topts.include_sine = !no_sine;
      return cmd_reproduce_table(topts, table_json, std::cout);
    }
    const ScenarioConfig cfg = resolve(o);
    if (o.print_config) {
      std::cout << config_to_json(cfg).dump(2) << '\n';
      return ExitCode::ok;
    }
    if (analyze->parsed()) return cmd_analyze(cfg, std::cout);
    if (synth->parsed()) return cmd_synth(cfg, std::cout);
    if (simulate->parsed()) return cmd_simulate(cfg, std::cout);
    if (verify->parsed()) return cmd_verify(cfg, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return ExitCode::infeasible;
  } catch (const SingularSystemError& e) {
    std::cerr << "singular: " << e.what() << " (rank " << e.rank() << " of " << e.dim() << ")\n";
    return ExitCode::infeasible;
  } catch (const DisconnectedGraphError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return ExitCode::infeasible;
  } catch (const ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << " (residual " << e.residual() << ")\n";
    return ExitCode::verification_failed;
  }
  return ExitCode::usage;
}
