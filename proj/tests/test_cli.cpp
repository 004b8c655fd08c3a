#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heavy_anchor/cli/commands.hpp"
#include "heavy_anchor/cli/config.hpp"
#include "heavy_anchor/cli/serialize.hpp"
#include "heavy_anchor/cli/table.hpp"

using namespace heavy_anchor;
using namespace heavy_anchor::cli;
using io::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("heavy_anchor_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const fs::path log = fs::temp_directory_path() / "heavy_anchor_cli_out.txt";
  const std::string cmd = std::string(HEAVY_ANCHOR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream is(log);
    std::stringstream ss;
    ss << is.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string usage_message(const json& j) {
  try {
    config_from_json(j);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config round trip keeps every field") {
  ScenarioConfig cfg;
  cfg.game.fixture = "g3";
  cfg.info_mode = "partial";
  cfg.theorem = "dist-quad";
  cfg.alpha = 0.25;
  cfg.c = 9000;
  cfg.T = 12.5;
  cfg.h = 1e-4;
  cfg.seed = 99;
  cfg.x0 = Vector::LinSpaced(3, 0, 1);
  cfg.exec = kernels::Exec::parallel;
  const json j = config_to_json(cfg);
  const ScenarioConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(back.alpha == 0.25);
  CHECK_FALSE(back.beta.has_value());
  CHECK(back.seed == 99);
  CHECK(back.exec == kernels::Exec::parallel);
}

TEST_CASE("defaults survive a print/parse cycle") {
  const json j = config_to_json(ScenarioConfig{});
  CHECK(config_to_json(config_from_json(j)) == j);
  CHECK(j.at("integrator").at("stiffness_factor") == 1.0);
  CHECK(j.at("tolerances").at("residual") == 1e-3);
}

TEST_CASE("config errors carry the field path") {
  CHECK(usage_message(json{{"integrator", {{"horizon", 3}}}}).find(".integrator.horizon") != std::string::npos);
  CHECK(usage_message(json{{"integrator", {{"T", "long"}}}}).find(".integrator.T") != std::string::npos);
  CHECK(usage_message(json{{"info_mode", "half"}}).find(".info_mode") != std::string::npos);
  CHECK(usage_message(json{{"theorem", "thm9"}}).find(".theorem") != std::string::npos);
  CHECK(usage_message(json{{"game", {{"fixture", "g1"}, {"plugin", "x"}}}}).find(".game") != std::string::npos);
  CHECK(usage_message(json{{"initial", {{"seed", -1}}}}).find(".initial.seed") != std::string::npos);
  const json bad_game = json::parse(R"({"game": {"quadratic": {"A": [[1, 0], [0]], "b": [0, 0]}}})");
  CHECK(usage_message(bad_game).find("game.quadratic.A[1]") != std::string::npos);
}

TEST_CASE("inline quadratic games, flat or nested") {
  const json nested = json::parse(R"({"dims": [1, 1], "A": [[0, 1], [-1, 0]], "b": [1, 0]})");
  const json flat = json::parse(R"({"dims": [1, 1], "A": [0, 1, -1, 0], "b": [1, 0]})");
  const QuadraticGame a = io::quadratic_from_json(nested);
  const QuadraticGame b = io::quadratic_from_json(flat);
  CHECK(a.A == b.A);
  CHECK(io::quadratic_from_json(io::to_json(a)).A == a.A);
  CHECK_THROWS_AS(io::quadratic_from_json(json::parse(R"({"A": [1, 2, 3]})")), InputError);
}

TEST_CASE("theorem selection") {
  ScenarioConfig cfg;
  const Game harmonic = build_benchmark("harmonic");
  const Game g1 = build_benchmark("g1");
  const Game sine = build_benchmark("sine");
  OperatorConstants mono, hypo;
  hypo.mu = 1;
  CHECK(select_theorem(cfg, harmonic, mono) == Theorem::full_monotone);
  CHECK(select_theorem(cfg, g1, hypo) == Theorem::full_quadratic);
  CHECK(select_theorem(cfg, sine, hypo) == Theorem::full_hypomonotone);
  cfg.info_mode = "partial";
  CHECK(select_theorem(cfg, g1, hypo) == Theorem::dist_quadratic);
  CHECK(select_theorem(cfg, sine, hypo) == Theorem::dist_general);
  cfg.theorem = "full-quad";
  CHECK_THROWS_AS(select_theorem(cfg, g1, hypo), UsageError);
}

TEST_CASE("summary round trip and bit-identical rerun") {
  const fs::path dir = scratch_dir("summary");
  ScenarioConfig cfg;
  cfg.game.fixture = "g1";
  cfg.info_mode = "partial";
  cfg.T = 0.3;
  cfg.seed = 17;
  cfg.out_dir = dir.string();
  const RunOutcome run = run_scenario(cfg);
  const auto files = write_outputs(cfg, run, make_game(cfg));
  CHECK(files.size() == 3);
  std::ifstream is(dir / "run_summary.json");
  const json s = json::parse(is);
  CHECK(s.at("params").at("alpha").get<double>() == run.alpha);
  CHECK(s.at("params").at("beta").get<double>() == run.beta);
  CHECK(s.at("params").at("c").get<double>() == *run.c);
  CHECK(s.at("seed").get<std::uint64_t>() == 17);
  CHECK(s.contains("final_residual"));
  CHECK(s.contains("final_consensus_error"));
  CHECK(s.contains("wall_time"));
  const ScenarioConfig again = config_from_json(s.at("config"));
  const RunOutcome rerun = run_scenario(again);
  CHECK((rerun.trajectory.x.back() - run.trajectory.x.back()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rerun.trajectory.steps == run.trajectory.steps);
}

TEST_CASE("trajectory csv and plot data") {
  const fs::path dir = scratch_dir("csv");
  ScenarioConfig cfg;
  cfg.game.fixture = "harmonic";
  cfg.T = 1;
  cfg.out_dir = dir.string();
  cfg.prefix = "h";
  const RunOutcome run = run_scenario(cfg);
  write_outputs(cfg, run, make_game(cfg));
  std::ifstream csv(dir / "h.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "time,x_1,x_2,r_1,r_2,ne_residual,consensus_error,lyapunov");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == run.trajectory.size());
  CHECK(fs::exists(dir / "h_actions.dat"));
  CHECK(fs::exists(dir / "h_metrics.dat"));
  CHECK(fs::exists(dir / "h.gp"));
  std::ifstream dat(dir / "h_actions.dat");
  std::string line;
  std::getline(dat, line);
  CHECK(line == "# action 1");
  std::getline(dat, line);
  std::istringstream cols(line);
  double t = -1, v = 0;
  cols >> t >> v;
  CHECK(t == 0.0);
}

TEST_CASE("overrides outside the certificate need force") {
  ScenarioConfig cfg;
  cfg.game.fixture = "g1";
  cfg.info_mode = "partial";
  cfg.T = 0.01;
  cfg.c = 10.0;
  CHECK_THROWS_AS(run_scenario(cfg), InputError);
  cfg.force = true;
  const RunOutcome run = run_scenario(cfg);
  CHECK_FALSE(run.certified);
  CHECK_FALSE(run.lyapunov.has_value());
}

TEST_CASE("infeasible certificates stop the run") {
  ScenarioConfig cfg;
  cfg.game.fixture = "g2";
  cfg.info_mode = "partial";
  cfg.theorem = "dist-general";
  CHECK_THROWS_AS(run_scenario(cfg), InfeasibleError);
  std::ostringstream out;
  CHECK(cmd_synth(cfg, out) == ExitCode::infeasible);
  CHECK(json::parse(out.str()).at("feasible") == false);
}

TEST_CASE("synth and analyze output") {
  ScenarioConfig cfg;
  cfg.game.fixture = "g1";
  cfg.info_mode = "partial";
  cfg.theorem = "dist-quad";
  std::ostringstream out;
  REQUIRE(cmd_synth(cfg, out) == ExitCode::ok);
  const json j = json::parse(out.str());
  CHECK(j.at("beta").get<double>() == doctest::Approx(0.35));
  CHECK(j.at("alpha").get<double>() == doctest::Approx(0.270).epsilon(0.02));
  CHECK(j.at("c_min").get<double>() == doctest::Approx(1517).epsilon(0.02));
  CHECK(j.at("aux").contains("P"));
  std::ostringstream a;
  cfg.game.fixture = "harmonic";
  REQUIRE(cmd_analyze(cfg, a) == ExitCode::ok);
  const json k = json::parse(a.str());
  CHECK(k.at("constants").at("mu").get<double>() == doctest::Approx(0.0));
  CHECK(k.at("constants").at("L").get<double>() == doctest::Approx(1.0));
  CHECK(k.at("constants").at("R").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("table tolerance") {
  CHECK(cell_within_tolerance(1517, 1516.98));
  CHECK(cell_within_tolerance(0.0, 0.004));
  CHECK_FALSE(cell_within_tolerance(0.0, 0.006));
  CHECK(cell_within_tolerance(1000, 1019));
  CHECK_FALSE(cell_within_tolerance(1000, 1021));
  CHECK(reference_table().size() == 7);
}

TEST_CASE("reproduced table matches") {
  TableOptions o;
  o.include_sine = false;
  const TableReport rep = reproduce_table(o);
  CHECK(rep.all_ok);
  CHECK(rep.computed.size() == 6);
}

TEST_CASE("binary exit codes") {
  const fs::path dir = scratch_dir("bin");
  std::string out;
  CHECK(run_cli("synth g1 --info partial --theorem dist-quad", &out) == 0);
  CHECK(run_cli("synth g2 --info partial --theorem dist-general") == 2);
  CHECK(run_cli("analyze no-such-game") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("verify harmonic --dynamics gradient -T 5 --out " + dir.string()) == 3);
  CHECK(run_cli("simulate harmonic -T 2 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "run_summary.json"));
  CHECK(run_cli("simulate harmonic --print-config", &out) == 0);
  CHECK(json::parse(out).contains("integrator"));
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"integrator": {"steps": 4}})";
  CHECK(run_cli("simulate --config " + cfg.string(), &out) == 1);
  CHECK(out.find(".integrator.steps") != std::string::npos);
}

}
