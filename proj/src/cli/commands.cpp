#include "heavy_anchor/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "heavy_anchor/dynamics.hpp"

namespace heavy_anchor::cli {

using io::json;

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool numerically_monotone(const OperatorConstants& c) {
  return c.mu <= 1e-9 * std::max(1.0, c.lipschitz);
}

IntegratorOptions integrator_options(const ScenarioConfig& cfg, const OperatorConstants& c) {
  IntegratorOptions o;
  o.T = cfg.T;
  o.h = cfg.h;
  o.stiffness_factor = cfg.stiffness_factor;
  o.lipschitz = c.lipschitz;
  o.max_steps = cfg.max_steps;
  o.decimation = cfg.decimation;
  o.max_samples = cfg.max_samples;
  o.seed = cfg.seed;
  o.exec = cfg.exec;
  return o;
}

Vector initial_state(const std::optional<Vector>& given, Eigen::Index size, std::uint64_t seed,
                     const ScenarioConfig& cfg, const char* what) {
  if (given) {
    require_size(given->size(), size, what);
    return *given;
  }
  return random_initial_state(size, seed, cfg.init_low, cfg.init_high);
}

json monotonicity_json(const MonotonicityReport& m) {
  return {{"non_increasing", m.non_increasing}, {"worst_increase", m.worst_increase},
          {"worst_index", m.worst_index},       {"slack", m.slack},
          {"v0", m.v0},                         {"v_final", m.v_final}};
}

void print(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace

Game make_game(const ScenarioConfig& cfg) {
  if (cfg.game.quadratic) return Game::from_quadratic("inline", *cfg.game.quadratic);
  try {
    return resolve_game(cfg.game.fixture);
  } catch (const InputError& e) {
    throw UsageError(std::string("config .game: ") + e.what());
  }
}

std::optional<CommGraph> make_graph(const ScenarioConfig& cfg) {
  if (cfg.info_mode != "partial") return std::nullopt;
  try {
    return build_graph(cfg.graph);
  } catch (const InputError& e) {
    throw UsageError(std::string("config .graph: ") + e.what());
  }
}

SamplingOptions sampling_options(const ScenarioConfig& cfg) {
  SamplingOptions s;
  s.box_lo = cfg.sample_low;
  s.box_hi = cfg.sample_high;
  s.pairs = cfg.sample_pairs;
  s.seed = cfg.sample_seed;
  s.local_fraction = cfg.local_fraction;
  s.exec = cfg.exec;
  return s;
}

OperatorConstants game_constants(const Game& game, const ScenarioConfig& cfg) {
  if (const QuadraticGame* qg = game.quadratic()) return exact_quadratic_constants(*qg);
  return sampled_constants(pseudo_gradient_operator(game), game.dim(), sampling_options(cfg));
}

Theorem select_theorem(const ScenarioConfig& cfg, const Game& game, const OperatorConstants& c) {
  const bool partial = cfg.info_mode == "partial";
  if (cfg.theorem != "auto") {
    const Theorem t = theorem_from_string(cfg.theorem);
    if (is_distributed(t) != partial) {
      throw UsageError(std::string("config .theorem: '") + cfg.theorem + "' does not apply to info_mode '" +
                       cfg.info_mode + "'");
    }
    return t;
  }
  if (partial) return game.quadratic() ? Theorem::dist_quadratic : Theorem::dist_general;
  if (numerically_monotone(c)) return Theorem::full_monotone;
  return game.quadratic() ? Theorem::full_quadratic : Theorem::full_hypomonotone;
}

ParameterCertificate synthesize(const ScenarioConfig& cfg, const Game& game, const CommGraph* graph,
                                Theorem theorem, const OperatorConstants& c) {
  SynthOptions o;
  o.d = cfg.d;
  o.alpha = cfg.alpha;
  o.beta = cfg.beta;
  o.force = cfg.force;
  o.variant = cfg.alpha_variant == "per-agent" ? FullInfoAlphaVariant::per_agent
                                               : FullInfoAlphaVariant::single_agent;
  const QuadraticGame* qg = game.quadratic();
  const bool needs_quadratic = theorem == Theorem::full_quadratic || theorem == Theorem::dist_quadratic;
  if (needs_quadratic && !qg) {
    throw UsageError(std::string("theorem '") + to_string(theorem) + "' requires a quadratic game");
  }
  if (is_distributed(theorem) && !graph) throw UsageError("distributed theorems need a graph");
  switch (theorem) {
    case Theorem::full_monotone: {
      ParameterCertificate cert = synth_full_monotone(o);
      cert.aux.mu = c.mu;
      cert.aux.lipschitz = c.lipschitz;
      if (!numerically_monotone(c)) {
        cert.feasible = false;
        cert.reason = "pseudo-gradient is not monotone (mu = " + std::to_string(c.mu) + ")";
      }
      return cert;
    }
    case Theorem::full_hypomonotone:
      return synth_full_hypomonotone(c, game.n_agents(), o);
    case Theorem::full_quadratic:
      return synth_full_quadratic(*qg, o);
    case Theorem::dist_general:
      return synth_partial_general(c, game.n_agents(), *graph, o);
    case Theorem::dist_quadratic:
      return synth_quadratic_partial(*qg, *graph, o);
  }
  throw UsageError("unknown theorem");
}

Vector find_equilibrium(const Game& game) {
  if (const QuadraticGame* qg = game.quadratic()) return solve_quadratic_ne(*qg);
  const Eigen::Index n = game.dim();
  Vector x = Vector::Zero(n);
  Vector f = game.pseudo_gradient(x);
  Matrix J(n, n);
  for (int it = 0; it < 100 && f.norm() > 1e-12; ++it) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(x[k]));
      Vector xp = x, xm = x;
      xp[k] += step;
      xm[k] -= step;
      J.col(k) = (game.pseudo_gradient(xp) - game.pseudo_gradient(xm)) / (2.0 * step);
    }
    const Vector dx = J.colPivHouseholderQr().solve(-f);
    double t = 1.0;
    Vector xn = x + dx;
    Vector fn = game.pseudo_gradient(xn);
    while (fn.norm() >= f.norm() && t > 1e-8) {
      t *= 0.5;
      xn = x + t * dx;
      fn = game.pseudo_gradient(xn);
    }
    if (fn.norm() >= f.norm()) break;
    x = xn;
    f = fn;
  }
  if (f.norm() > 1e-8) throw ConvergenceError("equilibrium search did not converge", f.norm());
  return x;
}

RunOutcome run_scenario(const ScenarioConfig& cfg) {
  const Game game = make_game(cfg);
  const std::optional<CommGraph> graph = make_graph(cfg);
  const int N = game.n_agents();
  if (graph && graph->size() != N) {
    throw UsageError("config .graph.n: graph has " + std::to_string(graph->size()) +
                     " nodes but the game has " + std::to_string(N) + " agents");
  }
  if (cfg.T <= 0.0) throw UsageError("config .integrator.T: must be positive");

  RunOutcome run;
  run.equilibrium = find_equilibrium(game);
  const OperatorConstants constants = game_constants(game, cfg);
  const IntegratorOptions iopts = integrator_options(cfg, constants);
  const Eigen::Index size = graph ? N * game.dim() : game.dim();
  const Vector x0 = initial_state(cfg.x0, size, cfg.seed, cfg, "initial.x0");

  std::optional<Theorem> theorem;
  if (cfg.dynamics == "gradient") {
    if (graph) throw UsageError("gradient play is simulated in full information only");
    run.trajectory = simulate_gradient_play(game, x0, iopts);
  } else {
    const Vector r0 = initial_state(cfg.r0, size, cfg.seed + 1, cfg, "initial.r0");
    theorem = select_theorem(cfg, game, constants);
    ParameterCertificate cert = synthesize(cfg, game, graph ? &*graph : nullptr, *theorem, constants);
    if (cert.feasible) {
      run.alpha = cert.alpha;
      run.beta = cert.beta;
    } else if (cfg.force && cfg.alpha && cfg.beta) {
      run.alpha = *cfg.alpha;
      run.beta = *cfg.beta;
    } else {
      throw InfeasibleError(std::string(to_string(*theorem)) + ": " + cert.reason);
    }
    run.certified = cert.feasible && accepts(cert, run.alpha, run.beta);
    if (graph) {
      if (cfg.c) {
        if (cert.c_min && *cfg.c < *cert.c_min && !cfg.force) {
          throw InputError("parameters.c = " + std::to_string(*cfg.c) + " is below c_min = " +
                           std::to_string(*cert.c_min) + " (use force to override)");
        }
        run.c = *cfg.c;
      } else if (cert.c_min) {
        run.c = cfg.c_factor * *cert.c_min;
      } else {
        throw InfeasibleError("no certified consensus gain; set parameters.c with force");
      }
      run.certified = run.certified && cert.c_min && *run.c >= *cert.c_min;
      run.trajectory = simulate_heavy_anchor_distributed(game, *graph, x0, r0, run.alpha, run.beta,
                                                         *run.c, iopts);
    } else {
      run.trajectory = simulate_heavy_anchor_full(game, x0, r0, run.alpha, run.beta, iopts);
    }
    if (run.certified) {
      const LyapunovSpec spec = lyapunov_for(cert, game, run.equilibrium);
      attach_lyapunov(run.trajectory, spec);
      run.lyapunov = check_lyapunov_decrease(run.trajectory, cfg.lyapunov_slack);
    }
    run.certificate = std::move(cert);
  }

  const Trajectory& tr = run.trajectory;
  run.verdict = detect_convergence(tr, cfg.tol_residual, cfg.tol_consensus);
  run.rate = estimate_rate(tr, run.equilibrium);

  json s;
  s["game"] = game.name();
  s["dynamics"] = cfg.dynamics;
  s["info_mode"] = cfg.info_mode;
  s["theorem"] = theorem ? json(to_string(*theorem)) : json(nullptr);
  s["certified"] = run.certified;
  s["params"] = {{"alpha", cfg.dynamics == "gradient" ? json(nullptr) : json(run.alpha)},
                 {"beta", cfg.dynamics == "gradient" ? json(nullptr) : json(run.beta)},
                 {"c", opt_json(run.c)},
                 {"d", run.certificate ? opt_json(run.certificate->d) : json(nullptr)}};
  s["seed"] = cfg.seed;
  s["integrator"] = {{"method", tr.method}, {"h", tr.h},
                     {"steps", tr.steps},   {"T", tr.steps * tr.h},
                     {"decimation", tr.decimation}, {"samples", tr.size()}};
  s["final_residual"] = tr.empty() ? 0.0 : tr.diagnostics.back().ne_residual;
  s["final_consensus_error"] = tr.empty() ? 0.0 : tr.diagnostics.back().consensus_error;
  s["converged"] = run.verdict.converged;
  s["converged_at"] = opt_json(run.verdict.time);
  s["aborted"] = tr.aborted;
  if (tr.aborted) {
    s["abort_time"] = tr.abort_time;
    s["abort_reason"] = tr.abort_reason;
  }
  s["lyapunov"] = run.lyapunov ? monotonicity_json(*run.lyapunov) : json(nullptr);
  s["rate_estimate"] = io::to_json(run.rate);
  s["wall_time"] = tr.wall_time;
  s["certificate"] = run.certificate ? io::to_json(*run.certificate) : json(nullptr);
  s["config"] = config_to_json(cfg);
  run.summary = std::move(s);
  return run;
}

std::vector<std::string> write_outputs(const ScenarioConfig& cfg, const RunOutcome& run,
                                       const Game& game) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  if (!cfg.write_csv && !cfg.write_summary && !cfg.write_plot) return written;
  fs::create_directories(cfg.out_dir);
  const fs::path base(cfg.out_dir);
  if (cfg.write_csv) {
    const fs::path p = base / (cfg.prefix + ".csv");
    std::ofstream os(p);
    io::write_trajectory_csv(os, run.trajectory);
    written.push_back(p.string());
  }
  if (cfg.write_plot) {
    std::optional<Selection> sel;
    if (run.trajectory.distributed) sel.emplace(game.dims());
    written.push_back(io::write_plot_data(cfg.out_dir, cfg.prefix, run.trajectory,
                                          sel ? &*sel : nullptr));
  }
  if (cfg.write_summary) {
    const fs::path p = base / (cfg.prefix + "_summary.json");
    json s = run.summary;
    s["files"] = written;
    std::ofstream os(p);
    os << s.dump(2) << '\n';
    written.push_back(p.string());
  }
  return written;
}

int cmd_analyze(const ScenarioConfig& cfg, std::ostream& out) {
  const Game game = make_game(cfg);
  const OperatorConstants c = game_constants(game, cfg);
  json j;
  j["game"] = game.name();
  j["n_agents"] = game.n_agents();
  j["dim"] = game.dim();
  j["constants"] = io::to_json(c);
  json res;
  const double lam_lo = c.inv_lipschitz ? c.mu * *c.inv_lipschitz * *c.inv_lipschitz : 0.0;
  const double lam_hi = c.mu > 0.0 ? 1.0 / c.mu : std::numeric_limits<double>::infinity();
  res["lambda_range"] = io::to_json(OpenInterval{lam_lo, lam_hi});
  res["lambda_lower_inclusive"] = true;
  res["feasible"] = c.inv_lipschitz.has_value() && lam_hi > lam_lo;
  if (!c.inv_lipschitz) res["reason"] = "no inverse-Lipschitz constant";
  j["resolvent"] = res;
  j["monotone"] = numerically_monotone(c);
  if (const QuadraticGame* qg = game.quadratic()) {
    j["equilibrium"] = io::vector_json(find_equilibrium(game));
    j["stability"] = io::to_json(quadratic_stability_intervals(*qg));
  }
  print(out, j);
  return ExitCode::ok;
}

int cmd_synth(const ScenarioConfig& cfg, std::ostream& out) {
  const Game game = make_game(cfg);
  const std::optional<CommGraph> graph = make_graph(cfg);
  if (graph && graph->size() != game.n_agents()) {
    throw UsageError("config .graph.n: graph size differs from the number of agents");
  }
  const OperatorConstants c = game_constants(game, cfg);
  const Theorem t = select_theorem(cfg, game, c);
  const ParameterCertificate cert = synthesize(cfg, game, graph ? &*graph : nullptr, t, c);
  json j = io::to_json(cert);
  j["constants"] = io::to_json(c);
  print(out, j);
  return cert.feasible ? ExitCode::ok : ExitCode::infeasible;
}

int cmd_simulate(const ScenarioConfig& cfg, std::ostream& out) {
  const RunOutcome run = run_scenario(cfg);
  const Game game = make_game(cfg);
  json s = run.summary;
  s.erase("config");
  s.erase("certificate");
  s["files"] = write_outputs(cfg, run, game);
  print(out, s);
  return run.trajectory.aborted ? ExitCode::verification_failed : ExitCode::ok;
}

int cmd_verify(const ScenarioConfig& cfg, std::ostream& out) {
  const RunOutcome run = run_scenario(cfg);
  json checks = json::array();
  bool ok = true;
  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({{"check", name}, {"pass", pass}, {"detail", detail}});
    ok = ok && pass;
  };
  if (cfg.dynamics == "anchor") {
    check("certified", run.certified,
          run.certified ? "parameters inside certified ranges" : "parameters not certified");
  }
  check("not_aborted", !run.trajectory.aborted, run.trajectory.abort_reason);
  {
    std::ostringstream d;
    d << "final residual " << run.verdict.final_residual << ", consensus error "
      << run.verdict.final_consensus;
    check("converged", run.verdict.converged, d.str());
  }
  if (run.lyapunov) {
    std::ostringstream d;
    d << "worst increase " << run.lyapunov->worst_increase << " vs slack " << run.lyapunov->slack;
    check("lyapunov_non_increasing", run.lyapunov->non_increasing, d.str());
  }
  json j;
  j["pass"] = ok;
  j["checks"] = checks;
  j["summary"] = run.summary;
  j["summary"].erase("config");
  print(out, j);
  return ok ? ExitCode::ok : ExitCode::verification_failed;
}

}  // namespace heavy_anchor::cli
