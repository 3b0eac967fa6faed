#pragma once

// File formats for sets, traces, curves, grid problems and scan reports.
// Numbers are written in shortest round-trip form so a re-read is exact.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sobext/besov.hpp"
#include "sobext/core.hpp"
#include "sobext/experiments.hpp"
#include "sobext/sobolev.hpp"

namespace sobext::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Throws IoError naming the path on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Rows of a CSV file with the given header; blank lines are skipped.
std::vector<std::vector<double>> parse_csv(std::string_view text,
                                           const std::vector<std::string>& header);

// Sets: {"kind", "p", "points": [[x, y], ...]} or CSV "x,y".
Json set_to_json(const core::PlanarSet& set);
core::PlanarSet set_from_json(const Json& j);
std::string set_to_csv(const core::PlanarSet& set);
core::PlanarSet set_from_csv(std::string_view text);

// Traces: CSV "s,value".
struct Trace {
  std::vector<double> sites;
  std::vector<double> values;
};
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(std::string_view text);

Json energy_report_to_json(const besov::EnergyReport& r);
Json curve_to_json(const besov::PiecewiseCurve& c);
Json integral_to_json(const besov::BesovIntegral& r);

// Grid problems: {"p", "box": [x_min, x_max, y_min, y_max], "n",
// "point_constraints": [[i, j, value], ...], "derivative_constraints":
// [[i, j, axis, value], ...], "epsilon_schedule": [...], "tol": {...}}.
Json box_to_json(const sobolev::Box& b);
sobolev::Box box_from_json(const Json& j);
Json solver_config_to_json(const sobolev::SolverConfig& c);
/// Fields missing from `tol` keep their defaults.
sobolev::SolverConfig solver_config_from_json(const Json& schedule, const Json& tol);
Json problem_to_json(const sobolev::GridProblem& problem);
sobolev::GridProblem problem_from_json(const Json& j);

/// CSV "x,y,value", one row per node.
std::string field_to_csv(const sobolev::Grid& grid, const sobolev::GridField& field);
Json solve_report_to_json(const sobolev::SolveReport& r);

// Scans. Runtimes are left out so that output depends only on the inputs.
/// Columns: p,N,K,Q,second_order_part,pair_part,lower_bound,slope_mismatch,status
std::string dyadic_scan_to_csv(const experiments::DyadicScan& scan);
Json dyadic_scan_summary(const experiments::DyadicScan& scan);
/// Columns: p,D,scheme,trace,samples,seed,max_ratio,mean_ratio,min_ratio,max_Q,status
std::string curve_scan_to_csv(const experiments::CurveScan& scan);
Json depth_probe_to_json(const experiments::DepthProbeReport& r);

}  // namespace sobext::io
