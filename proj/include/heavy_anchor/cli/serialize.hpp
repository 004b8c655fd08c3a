#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "heavy_anchor/diagnostics.hpp"
#include "heavy_anchor/game.hpp"
#include "heavy_anchor/operator_analysis.hpp"
#include "heavy_anchor/param_synth.hpp"
#include "heavy_anchor/trajectory.hpp"

namespace heavy_anchor::io {

using json = nlohmann::ordered_json;

json to_json(const QuadraticGame& qg);
QuadraticGame quadratic_from_json(const json& j, const std::string& path = "game.quadratic");

json to_json(const OperatorConstants& c);
OperatorConstants constants_from_json(const json& j);
json to_json(const ResolventConstants& rc);
json to_json(const OpenInterval& r);
json to_json(const QuadraticStabilityReport& rep);
json to_json(const ParameterCertificate& cert);
json to_json(const RateEstimate& est);

json vector_json(const Vector& v);
json matrix_json(const Matrix& M);  // rows of numbers
Vector vector_from_json(const json& j, const std::string& path);
Matrix matrix_from_json(const json& j, const std::string& path);  // rows, or flat row-major with n

// time, x_1..x_m, [r_1..r_m], ne_residual, consensus_error, lyapunov
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

// One file per series with two whitespace-separated columns, plus a gnuplot
// script that plots them. Returns the script path.
std::string write_plot_data(const std::string& dir, const std::string& prefix,
                            const Trajectory& tr, const Selection* selection);

}  // namespace heavy_anchor::io
