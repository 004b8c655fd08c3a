#include "heavy_anchor/cli/serialize.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace heavy_anchor::io {

namespace {

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

template <class T>
json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) {
    return num(*v);
  } else {
    return *v;
  }
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

}  // namespace

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(vector_json(M.row(i).transpose()));
  return rows;
}

Vector vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = number_at(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a nonempty array");
  if (j[0].is_array()) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const std::string rp = path + "[" + std::to_string(i) + "]";
      const Vector row = vector_from_json(j[static_cast<std::size_t>(i)], rp);
      if (row.size() != cols) bad(rp, "ragged matrix row");
      M.row(i) = row.transpose();
    }
    return M;
  }
  const Vector flat = vector_from_json(j, path);
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
  if (n * n != flat.size()) bad(path, "flat matrix length is not a perfect square");
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) M(i, k) = flat[i * n + k];
  }
  return M;
}

json to_json(const QuadraticGame& qg) {
  json j;
  j["dims"] = qg.dims;
  json flat = json::array();
  for (Eigen::Index i = 0; i < qg.A.rows(); ++i) {
    for (Eigen::Index k = 0; k < qg.A.cols(); ++k) flat.push_back(qg.A(i, k));
  }
  j["A"] = flat;
  j["b"] = vector_json(qg.b);
  return j;
}

QuadraticGame quadratic_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object {dims, A, b}");
  QuadraticGame qg;
  if (!j.contains("A")) bad(path + ".A", "missing");
  qg.A = matrix_from_json(j.at("A"), path + ".A");
  if (j.contains("b")) {
    qg.b = vector_from_json(j.at("b"), path + ".b");
  } else {
    qg.b = Vector::Zero(qg.A.rows());
  }
  if (j.contains("dims")) {
    const json& d = j.at("dims");
    if (!d.is_array()) bad(path + ".dims", "expected an array of integers");
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!d[i].is_number_integer()) bad(path + ".dims[" + std::to_string(i) + "]", "expected an integer");
      qg.dims.push_back(d[i].get<int>());
    }
  } else {
    qg.dims.assign(static_cast<std::size_t>(qg.A.rows()), 1);
  }
  try {
    qg.validate();
  } catch (const InputError& e) {
    bad(path, e.what());
  }
  return qg;
}

json to_json(const OperatorConstants& c) {
  json j;
  j["mu"] = num(c.mu);
  j["L"] = num(c.lipschitz);
  j["R"] = opt(c.inv_lipschitz);
  j["provenance"] = to_string(c.provenance);
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  return j;
}

OperatorConstants constants_from_json(const json& j) {
  OperatorConstants c;
  c.mu = number_at(j.at("mu"), "constants.mu");
  c.lipschitz = number_at(j.at("L"), "constants.L");
  if (j.contains("R") && !j.at("R").is_null()) c.inv_lipschitz = number_at(j.at("R"), "constants.R");
  const std::string p = j.value("provenance", "exact");
  c.provenance = p == "sampled" ? Provenance::sampled : Provenance::exact;
  c.samples = j.value("samples", std::uint64_t{0});
  c.seed = j.value("seed", std::uint64_t{0});
  return c;
}

json to_json(const ResolventConstants& rc) {
  json j;
  j["lambda"] = num(rc.lambda);
  j["feasible"] = rc.feasible;
  j["L_J"] = opt(rc.lipschitz);
  j["kappa_J"] = opt(rc.kappa);
  if (!rc.reason.empty()) j["reason"] = rc.reason;
  return j;
}

json to_json(const OpenInterval& r) { return json::array({num(r.lo), num(r.hi)}); }

json to_json(const QuadraticStabilityReport& rep) {
  json j;
  j["scale"] = rep.scale;
  j["feasible"] = rep.feasible;
  j["beta_range"] = to_json(rep.beta_range);
  json ev = json::array();
  for (const auto& e : rep.eigen) {
    json item;
    item["re"] = e.rho.real();
    item["im"] = e.rho.imag();
    item["case"] = e.kind == EigenCase::zero          ? "zero"
                   : e.kind == EigenCase::nonnegative ? "nonnegative-real"
                                                      : "negative-real";
    if (e.beta) item["beta"] = to_json(*e.beta);
    ev.push_back(item);
  }
  j["eigenvalues"] = ev;
  if (rep.blocking) j["blocking_index"] = *rep.blocking;
  return j;
}

json to_json(const ParameterCertificate& cert) {
  json j;
  j["theorem"] = to_string(cert.theorem);
  j["feasible"] = cert.feasible;
  if (!cert.reason.empty()) j["reason"] = cert.reason;
  j["n_agents"] = cert.n_agents;
  j["beta_range"] = to_json(cert.beta_range);
  if (cert.feasible) {
    j["beta"] = cert.beta;
    j["alpha_range"] = to_json(cert.alpha_range);
    j["alpha"] = cert.alpha;
  }
  j["d"] = opt(cert.d);
  j["c_min"] = opt(cert.c_min);
  const auto& a = cert.aux;
  json aux;
  aux["mu"] = opt(a.mu);
  aux["L_F"] = opt(a.lipschitz);
  aux["R"] = opt(a.inv_lipschitz);
  aux["resolvent_lambda"] = opt(a.resolvent_lambda);
  aux["L_J"] = opt(a.L_J);
  aux["kappa_J"] = opt(a.kappa_J);
  if (a.Phi) aux["Phi"] = matrix_json(*a.Phi);
  aux["det_Phi"] = opt(a.det_phi);
  aux["eta1"] = opt(a.eta1);
  aux["eta2"] = opt(a.eta2);
  aux["lambda2"] = opt(a.lambda2);
  aux["L_A"] = opt(a.L_A);
  aux["L_ext"] = opt(a.L_ext);
  if (a.P) aux["P"] = matrix_json(*a.P);
  aux["p"] = opt(a.p);
  aux["p_simple_bound"] = opt(a.p_simple_bound);
  aux["p_bound_holds"] = opt(a.p_bound_holds);
  if (a.stability) aux["stability"] = to_json(*a.stability);
  for (auto it = aux.begin(); it != aux.end();) {
    if (it->is_null()) {
      it = aux.erase(it);
    } else {
      ++it;
    }
  }
  j["aux"] = aux;
  return j;
}

json to_json(const RateEstimate& est) {
  json j;
  j["available"] = est.available;
  j["rate"] = num(est.rate);
  j["window"] = json::array({est.t_begin, est.t_end});
  j["r_squared"] = num(est.r_squared);
  j["samples"] = est.samples;
  if (!est.note.empty()) j["note"] = est.note;
  return j;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const std::size_t m = tr.x.empty() ? 0 : static_cast<std::size_t>(tr.x.front().size());
  const bool has_r = !tr.r.empty();
  os << "time";
  for (std::size_t i = 1; i <= m; ++i) os << ",x_" << i;
  if (has_r) {
    for (std::size_t i = 1; i <= m; ++i) os << ",r_" << i;
  }
  os << ",ne_residual,consensus_error,lyapunov\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << tr.times[k];
    for (Eigen::Index i = 0; i < tr.x[k].size(); ++i) os << ',' << tr.x[k][i];
    if (has_r) {
      for (Eigen::Index i = 0; i < tr.r[k].size(); ++i) os << ',' << tr.r[k][i];
    }
    const auto& d = tr.diagnostics[k];
    os << ',' << d.ne_residual << ',' << d.consensus_error << ',';
    if (d.lyapunov) os << *d.lyapunov;
    os << '\n';
  }
}

std::string write_plot_data(const std::string& dir, const std::string& prefix,
                            const Trajectory& tr, const Selection* selection) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path actions = fs::path(dir) / (prefix + "_actions.dat");
  const fs::path metrics = fs::path(dir) / (prefix + "_metrics.dat");
  const fs::path script = fs::path(dir) / (prefix + ".gp");

  std::vector<Vector> acts;
  acts.reserve(tr.size());
  for (const auto& x : tr.x) acts.push_back(selection ? selection->select(x) : x);
  const Eigen::Index n = acts.empty() ? 0 : acts.front().size();
  {
    std::ofstream os(actions);
    os << std::setprecision(12);
    for (Eigen::Index i = 0; i < n; ++i) {
      os << "# action " << (i + 1) << "\n";
      for (std::size_t k = 0; k < tr.size(); ++k) os << tr.times[k] << ' ' << acts[k][i] << '\n';
      os << "\n\n";
    }
  }
  {
    std::ofstream os(metrics);
    os << std::setprecision(12);
    os << "# ne_residual\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
      os << tr.times[k] << ' ' << tr.diagnostics[k].ne_residual << '\n';
    }
    os << "\n\n# consensus_error\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
      os << tr.times[k] << ' ' << tr.diagnostics[k].consensus_error << '\n';
    }
    os << "\n\n";
  }
  {
    std::ofstream os(script);
    os << "set terminal pngcairo size 900,600\n";
    os << "set output '" << prefix << "_actions.png'\n";
    os << "set xlabel 't'\nset ylabel 'action'\nunset key\n";
    os << "plot for [i=0:" << (n > 0 ? n - 1 : 0) << "] '" << actions.filename().string()
       << "' index i using 1:2 with lines\n";
    os << "set output '" << prefix << "_metrics.png'\n";
    os << "set logscale y\nset ylabel 'error'\nset key\n";
    os << "plot '" << metrics.filename().string() << "' index 0 using 1:2 with lines title 'NE residual', \\\n";
    os << "     '" << metrics.filename().string() << "' index 1 using 1:2 with lines title 'consensus error'\n";
  }
  return script.string();
}

}  // namespace heavy_anchor::io
