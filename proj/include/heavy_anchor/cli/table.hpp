#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "heavy_anchor/cli/serialize.hpp"
#include "heavy_anchor/operator_analysis.hpp"
#include "heavy_anchor/param_synth.hpp"

namespace heavy_anchor::cli {

struct TableRow {
  std::string game;
  std::string theorem;  // dist-quad | dist-general
  bool feasible = true;
  double beta_min = 0.0;
  double beta_max = 0.0;
  double beta = 0.0;
  std::optional<double> d;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double alpha = 0.0;
  double c_min = 0.0;
};

// Published parameter table, plus the nonquadratic sine row.
const std::vector<TableRow>& reference_table();

TableRow row_from_certificate(const std::string& game, const ParameterCertificate& cert);

// Relative 2% or absolute 0.005, whichever is looser.
bool cell_within_tolerance(double expected, double actual);

struct CellDiff {
  std::string game;
  std::string theorem;
  std::string field;
  double expected = 0.0;
  double actual = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  bool ok = true;
};

struct TableReport {
  std::vector<TableRow> computed;
  std::vector<CellDiff> cells;
  bool all_ok = true;
  double runtime = 0.0;
};

struct TableOptions {
  bool include_sine = true;
  SamplingOptions sampling;  // sine constants are sampled
};

TableReport reproduce_table(const TableOptions& opts = {});

io::json to_json(const TableRow& row);
io::json to_json(const TableReport& rep);
void print_table(std::ostream& os, const TableReport& rep);

int cmd_reproduce_table(const TableOptions& opts, bool json_output, std::ostream& out);

}  // namespace heavy_anchor::cli
