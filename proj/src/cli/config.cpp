#include "heavy_anchor/cli/config.hpp"

#include <fstream>
#include <set>

namespace heavy_anchor::cli {

using io::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw UsageError("config " + path + ": " + what);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) bad(path + "." + it.key(), "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    bad(path, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected true or false");
  return j.get<bool>();
}

template <class F>
void maybe(const json& j, const char* key, const std::string& path, F&& f) {
  if (j.contains(key) && !j.at(key).is_null()) f(j.at(key), path + "." + key);
}

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Vector get_vector(const json& j, const std::string& path) {
  try {
    return io::vector_from_json(j, path);
  } catch (const InputError& e) {
    throw UsageError(std::string("config ") + e.what());
  }
}

}  // namespace

json config_to_json(const ScenarioConfig& c) {
  json j;
  json game;
  if (c.game.quadratic) {
    game["quadratic"] = io::to_json(*c.game.quadratic);
  } else {
    game["fixture"] = c.game.fixture;
  }
  j["game"] = game;
  json graph;
  graph["type"] = c.graph.type;
  graph["n"] = c.graph.n;
  graph["weight"] = c.graph.weight;
  if (c.graph.type == "custom") graph["weights"] = io::matrix_json(c.graph.custom_weights);
  j["graph"] = graph;
  j["info_mode"] = c.info_mode;
  j["theorem"] = c.theorem;
  j["dynamics"] = c.dynamics;
  j["parameters"] = {{"alpha", opt_num(c.alpha)},         {"beta", opt_num(c.beta)},
                     {"c", opt_num(c.c)},                 {"c_factor", c.c_factor},
                     {"d", c.d},                          {"alpha_variant", c.alpha_variant},
                     {"force", c.force}};
  j["integrator"] = {{"T", c.T},
                     {"h", opt_num(c.h)},
                     {"stiffness_factor", c.stiffness_factor},
                     {"max_steps", c.max_steps ? json(*c.max_steps) : json(nullptr)},
                     {"decimation", c.decimation},
                     {"max_samples", c.max_samples},
                     {"exec", kernels::to_string(c.exec)}};
  j["initial"] = {{"seed", c.seed},
                  {"low", c.init_low},
                  {"high", c.init_high},
                  {"x0", c.x0 ? io::vector_json(*c.x0) : json(nullptr)},
                  {"r0", c.r0 ? io::vector_json(*c.r0) : json(nullptr)}};
  j["sampling"] = {{"pairs", c.sample_pairs},
                   {"seed", c.sample_seed},
                   {"low", c.sample_low},
                   {"high", c.sample_high},
                   {"local_fraction", c.local_fraction}};
  j["tolerances"] = {{"residual", c.tol_residual},
                     {"consensus", c.tol_consensus},
                     {"lyapunov_slack", c.lyapunov_slack}};
  j["output"] = {{"dir", c.out_dir},
                 {"prefix", c.prefix},
                 {"csv", c.write_csv},
                 {"summary", c.write_summary},
                 {"plot", c.write_plot}};
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  only_keys(j, "", {"game", "graph", "info_mode", "theorem", "dynamics", "parameters",
                    "integrator", "initial", "sampling", "tolerances", "output"});
  maybe(j, "game", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"fixture", "plugin", "quadratic"});
    const int kinds = g.contains("fixture") + g.contains("plugin") + g.contains("quadratic");
    if (kinds != 1) bad(p, "exactly one of fixture, plugin, quadratic is required");
    maybe(g, "fixture", p, [&](const json& v, const std::string& q) { c.game.fixture = get_string(v, q); });
    maybe(g, "plugin", p, [&](const json& v, const std::string& q) { c.game.fixture = get_string(v, q); });
    maybe(g, "quadratic", p, [&](const json& v, const std::string& q) {
      try {
        c.game.quadratic = io::quadratic_from_json(v, q.substr(1));
      } catch (const InputError& e) {
        throw UsageError(std::string("config ") + e.what());
      }
      c.game.fixture = "inline";
    });
  });
  maybe(j, "graph", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"type", "n", "weight", "weights"});
    maybe(g, "type", p, [&](const json& v, const std::string& q) { c.graph.type = get_string(v, q); });
    maybe(g, "n", p, [&](const json& v, const std::string& q) { c.graph.n = static_cast<int>(get_count(v, q)); });
    maybe(g, "weight", p, [&](const json& v, const std::string& q) { c.graph.weight = get_number(v, q); });
    maybe(g, "weights", p, [&](const json& v, const std::string& q) {
      try {
        c.graph.custom_weights = io::matrix_from_json(v, q.substr(1));
      } catch (const InputError& e) {
        throw UsageError(std::string("config ") + e.what());
      }
    });
  });
  maybe(j, "info_mode", "", [&](const json& v, const std::string& q) {
    c.info_mode = get_string(v, q);
    if (c.info_mode != "full" && c.info_mode != "partial") bad(q, "expected full or partial");
  });
  maybe(j, "theorem", "", [&](const json& v, const std::string& q) {
    c.theorem = get_string(v, q);
    if (c.theorem != "auto") {
      try {
        theorem_from_string(c.theorem);
      } catch (const InputError& e) {
        bad(q, e.what());
      }
    }
  });
  maybe(j, "dynamics", "", [&](const json& v, const std::string& q) {
    c.dynamics = get_string(v, q);
    if (c.dynamics != "anchor" && c.dynamics != "gradient") bad(q, "expected anchor or gradient");
  });
  maybe(j, "parameters", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"alpha", "beta", "c", "c_factor", "d", "alpha_variant", "force"});
    maybe(g, "alpha", p, [&](const json& v, const std::string& q) { c.alpha = get_number(v, q); });
    maybe(g, "beta", p, [&](const json& v, const std::string& q) { c.beta = get_number(v, q); });
    maybe(g, "c", p, [&](const json& v, const std::string& q) { c.c = get_number(v, q); });
    maybe(g, "c_factor", p, [&](const json& v, const std::string& q) { c.c_factor = get_number(v, q); });
    maybe(g, "d", p, [&](const json& v, const std::string& q) { c.d = get_number(v, q); });
    maybe(g, "alpha_variant", p, [&](const json& v, const std::string& q) {
      c.alpha_variant = get_string(v, q);
      if (c.alpha_variant != "single-agent" && c.alpha_variant != "per-agent") {
        bad(q, "expected single-agent or per-agent");
      }
    });
    maybe(g, "force", p, [&](const json& v, const std::string& q) { c.force = get_bool(v, q); });
  });
  maybe(j, "integrator", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"T", "h", "stiffness_factor", "max_steps", "decimation", "max_samples", "exec"});
    maybe(g, "T", p, [&](const json& v, const std::string& q) { c.T = get_number(v, q); });
    maybe(g, "h", p, [&](const json& v, const std::string& q) { c.h = get_number(v, q); });
    maybe(g, "stiffness_factor", p, [&](const json& v, const std::string& q) { c.stiffness_factor = get_number(v, q); });
    maybe(g, "max_steps", p, [&](const json& v, const std::string& q) { c.max_steps = get_count(v, q); });
    maybe(g, "decimation", p, [&](const json& v, const std::string& q) { c.decimation = get_count(v, q); });
    maybe(g, "max_samples", p, [&](const json& v, const std::string& q) { c.max_samples = get_count(v, q); });
    maybe(g, "exec", p, [&](const json& v, const std::string& q) {
      const std::string e = get_string(v, q);
      if (e == "serial") {
        c.exec = kernels::Exec::serial;
      } else if (e == "parallel") {
        c.exec = kernels::Exec::parallel;
      } else {
        bad(q, "expected serial or parallel");
      }
    });
  });
  maybe(j, "initial", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"seed", "low", "high", "x0", "r0"});
    maybe(g, "seed", p, [&](const json& v, const std::string& q) { c.seed = get_count(v, q); });
    maybe(g, "low", p, [&](const json& v, const std::string& q) { c.init_low = get_number(v, q); });
    maybe(g, "high", p, [&](const json& v, const std::string& q) { c.init_high = get_number(v, q); });
    maybe(g, "x0", p, [&](const json& v, const std::string& q) { c.x0 = get_vector(v, q.substr(1)); });
    maybe(g, "r0", p, [&](const json& v, const std::string& q) { c.r0 = get_vector(v, q.substr(1)); });
  });
  maybe(j, "sampling", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"pairs", "seed", "low", "high", "local_fraction"});
    maybe(g, "pairs", p, [&](const json& v, const std::string& q) { c.sample_pairs = get_count(v, q); });
    maybe(g, "seed", p, [&](const json& v, const std::string& q) { c.sample_seed = get_count(v, q); });
    maybe(g, "low", p, [&](const json& v, const std::string& q) { c.sample_low = get_number(v, q); });
    maybe(g, "high", p, [&](const json& v, const std::string& q) { c.sample_high = get_number(v, q); });
    maybe(g, "local_fraction", p, [&](const json& v, const std::string& q) { c.local_fraction = get_number(v, q); });
  });
  maybe(j, "tolerances", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"residual", "consensus", "lyapunov_slack"});
    maybe(g, "residual", p, [&](const json& v, const std::string& q) { c.tol_residual = get_number(v, q); });
    maybe(g, "consensus", p, [&](const json& v, const std::string& q) { c.tol_consensus = get_number(v, q); });
    maybe(g, "lyapunov_slack", p, [&](const json& v, const std::string& q) { c.lyapunov_slack = get_number(v, q); });
  });
  maybe(j, "output", "", [&](const json& g, const std::string& p) {
    only_keys(g, p, {"dir", "prefix", "csv", "summary", "plot"});
    maybe(g, "dir", p, [&](const json& v, const std::string& q) { c.out_dir = get_string(v, q); });
    maybe(g, "prefix", p, [&](const json& v, const std::string& q) { c.prefix = get_string(v, q); });
    maybe(g, "csv", p, [&](const json& v, const std::string& q) { c.write_csv = get_bool(v, q); });
    maybe(g, "summary", p, [&](const json& v, const std::string& q) { c.write_summary = get_bool(v, q); });
    maybe(g, "plot", p, [&](const json& v, const std::string& q) { c.write_plot = get_bool(v, q); });
  });
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw UsageError("config parse error in '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace heavy_anchor::cli
