#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sobext/errors.hpp"
#include "sobext/io.hpp"

namespace sobext::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string status(const std::string& error) {
  if (error.empty()) return "ok";
  std::string s = "error: " + error;
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw IoError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("field '") + key + "': " + ex.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw IoError("not a number: '" + std::string(text) + "'");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<std::vector<double>> parse_csv(std::string_view text,
                                           const std::vector<std::string>& header) {
  std::vector<std::vector<double>> rows;
  bool seen_header = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (!seen_header) {
      seen_header = true;
      const bool match = cells.size() == header.size() &&
                         std::equal(cells.begin(), cells.end(), header.begin());
      if (!match) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw IoError("expected CSV header '" + expected + "'");
      }
      continue;
    }
    if (cells.size() != header.size())
      throw IoError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_double(c));
    rows.push_back(std::move(row));
  }
  if (!seen_header) throw IoError("empty CSV input");
  return rows;
}

Json set_to_json(const core::PlanarSet& set) {
  Json j;
  j["kind"] = core::to_string(set.kind);
  j["p"] = set.p ? Json(*set.p) : Json(nullptr);
  Json pts = Json::array();
  for (const auto& q : set.points) pts.push_back({q.x, q.y});
  j["points"] = std::move(pts);
  return j;
}

core::PlanarSet set_from_json(const Json& j) {
  core::PlanarSet s;
  try {
    s.kind = j.contains("kind") ? core::set_kind_from_string(j.at("kind").get<std::string>())
                                : core::SetKind::custom;
  } catch (const DomainError& ex) {
    throw IoError(ex.what());
  }
  if (j.contains("p") && !j.at("p").is_null()) s.p = get<double>(j, "p");
  for (const auto& q : require(j, "points")) {
    if (!q.is_array() || q.size() != 2) throw IoError("points must be [x, y] pairs");
    s.points.push_back({q[0].get<double>(), q[1].get<double>()});
  }
  return s;
}

std::string set_to_csv(const core::PlanarSet& set) {
  std::string out = "x,y\n";
  for (const auto& q : set.points) out += format_double(q.x) + "," + format_double(q.y) + "\n";
  return out;
}

core::PlanarSet set_from_csv(std::string_view text) {
  core::PlanarSet s;
  for (const auto& r : parse_csv(text, {"x", "y"})) s.points.push_back({r[0], r[1]});
  return s;
}

std::string trace_to_csv(const Trace& trace) {
  std::string out = "s,value\n";
  for (std::size_t i = 0; i < trace.sites.size(); ++i)
    out += format_double(trace.sites[i]) + "," + format_double(trace.values[i]) + "\n";
  return out;
}

Trace trace_from_csv(std::string_view text) {
  Trace t;
  for (const auto& r : parse_csv(text, {"s", "value"})) {
    t.sites.push_back(r[0]);
    t.values.push_back(r[1]);
  }
  return t;
}

Json energy_report_to_json(const besov::EnergyReport& r) {
  Json j;
  j["p"] = r.p;
  j["K"] = r.K;
  j["Q"] = r.Q;
  j["second_order_part"] = r.second_order_part;
  j["pair_part"] = r.pair_part;
  return j;
}

Json curve_to_json(const besov::PiecewiseCurve& c) {
  Json j;
  j["breakpoints"] = std::vector<double>(c.breakpoints().begin(), c.breakpoints().end());
  Json pieces = Json::array();
  for (const auto& q : c.pieces()) pieces.push_back({q[0], q[1], q[2], q[3]});
  j["coefficients"] = std::move(pieces);
  j["coefficient_basis"] = "c0 + c1 u + c2 u^2 + c3 u^3, u = s - breakpoint";
  j["left_tail"] = {{"slope", c.left_tail().slope}, {"intercept", c.left_tail().intercept}};
  j["right_tail"] = {{"slope", c.right_tail().slope}, {"intercept", c.right_tail().intercept}};
  return j;
}

Json integral_to_json(const besov::BesovIntegral& r) {
  Json j;
  j["value"] = r.infinite ? Json("inf") : Json(r.value);
  j["error_estimate"] = r.error_estimate;
  j["infinite"] = r.infinite;
  j["regions"] = r.regions;
  return j;
}

Json box_to_json(const sobolev::Box& b) { return Json::array({b.x_min, b.x_max, b.y_min, b.y_max}); }

sobolev::Box box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw IoError("box must be [x_min, x_max, y_min, y_max]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Json solver_config_to_json(const sobolev::SolverConfig& c) {
  Json j;
  j["rel_tol"] = c.rel_tol;
  j["grad_tol"] = c.grad_tol;
  j["max_iterations"] = c.max_iterations;
  j["constraint_tol"] = c.constraint_tol;
  j["dependency_tol"] = c.dependency_tol;
  return j;
}

sobolev::SolverConfig solver_config_from_json(const Json& schedule, const Json& tol) {
  sobolev::SolverConfig c;
  if (!schedule.is_null()) c.epsilon_schedule = schedule.get<std::vector<double>>();
  if (!tol.is_null()) {
    if (tol.contains("rel_tol")) c.rel_tol = tol.at("rel_tol").get<double>();
    if (tol.contains("grad_tol")) c.grad_tol = tol.at("grad_tol").get<double>();
    if (tol.contains("max_iterations")) c.max_iterations = tol.at("max_iterations").get<int>();
    if (tol.contains("constraint_tol")) c.constraint_tol = tol.at("constraint_tol").get<double>();
    if (tol.contains("dependency_tol")) c.dependency_tol = tol.at("dependency_tol").get<double>();
  }
  return c;
}

Json problem_to_json(const sobolev::GridProblem& problem) {
  Json j;
  j["p"] = problem.exponents.p();
  j["box"] = box_to_json(problem.grid.box());
  j["n"] = problem.grid.n();
  Json pc = Json::array();
  for (const auto& c : problem.point_constraints) pc.push_back({c.i, c.j, c.value});
  j["point_constraints"] = std::move(pc);
  Json dc = Json::array();
  for (const auto& c : problem.derivative_constraints) dc.push_back({c.i, c.j, c.axis, c.value});
  j["derivative_constraints"] = std::move(dc);
  j["epsilon_schedule"] = problem.config.epsilon_schedule;
  j["tol"] = solver_config_to_json(problem.config);
  return j;
}

sobolev::GridProblem problem_from_json(const Json& j) {
  try {
    const auto e = core::make_exponents(get<double>(j, "p"));
    const auto box = j.contains("box") ? box_from_json(j.at("box")) : sobolev::Box{};
    const int n = j.contains("n") ? j.at("n").get<int>() : 129;
    sobolev::GridProblem problem{sobolev::build_grid(box, n), e, {}, {}, {}, {}};
    if (j.contains("point_constraints"))
      for (const auto& c : j.at("point_constraints")) {
        if (!c.is_array() || c.size() != 3) throw IoError("point_constraints entries are [i, j, value]");
        problem.point_constraints.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<double>()});
      }
    if (j.contains("derivative_constraints"))
      for (const auto& c : j.at("derivative_constraints")) {
        if (!c.is_array() || c.size() != 4)
          throw IoError("derivative_constraints entries are [i, j, axis, value]");
        problem.derivative_constraints.push_back(
            {c[0].get<int>(), c[1].get<int>(), c[2].get<int>(), c[3].get<double>()});
      }
    problem.config = solver_config_from_json(j.value("epsilon_schedule", Json()), j.value("tol", Json()));
    return problem;
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("malformed problem: ") + ex.what());
  }
}

std::string field_to_csv(const sobolev::Grid& grid, const sobolev::GridField& field) {
  std::string out = "x,y,value\n";
  out.reserve(out.size() + field.values.size() * 48);
  for (int j = 0; j < grid.n(); ++j)
    for (int i = 0; i < grid.n(); ++i) {
      const auto q = grid.node(i, j);
      out += format_double(q.x);
      out += ',';
      out += format_double(q.y);
      out += ',';
      out += format_double(field.at(i, j));
      out += '\n';
    }
  return out;
}

Json solve_report_to_json(const sobolev::SolveReport& r) {
  Json j;
  j["norm_estimate"] = r.norm_estimate;
  j["smoothed_value"] = r.smoothed_value;
  j["iterations"] = r.iterations;
  j["final_epsilon"] = r.final_epsilon;
  j["first_order_residual"] = r.first_order_residual;
  j["newton_decrement"] = r.newton_decrement;
  j["constraint_residual"] = r.constraint_residual;
  j["free_variables"] = r.free_variables;
  j["dropped_constraints"] = r.dropped_constraints;
  Json stages = Json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"epsilon", s.epsilon},
                      {"smoothed_value", s.smoothed_value},
                      {"norm", s.norm},
                      {"iterations", s.iterations}});
  j["stages"] = std::move(stages);
  j["snap_distances"] = r.snap_distances;
  return j;
}

std::string dyadic_scan_to_csv(const experiments::DyadicScan& scan) {
  std::string out = "p,N,K,Q,second_order_part,pair_part,lower_bound,slope_mismatch,status\n";
  for (const auto& r : scan.rows) {
    out += format_double(scan.p) + "," + std::to_string(r.N) + "," + std::to_string(r.energy.K) +
           "," + format_double(r.energy.Q) + "," + format_double(r.energy.second_order_part) + "," +
           format_double(r.energy.pair_part) + "," + format_double(r.lower_bound) + "," +
           format_double(r.slope_mismatch) + "," + status(r.error) + "\n";
  }
  return out;
}

Json dyadic_scan_summary(const experiments::DyadicScan& scan) {
  Json j;
  j["note"] = std::string(experiments::kTrendNote);
  j["p"] = scan.p;
  std::vector<int> Ns;
  for (const auto& r : scan.rows) Ns.push_back(r.N);
  j["N_values"] = Ns;
  j["fit"] = {{"quantity", "Q against N"},
              {"slope", scan.fit.slope},
              {"intercept", scan.fit.intercept},
              {"r2", scan.fit.r2}};
  j["all_ok"] = scan.all_ok();
  return j;
}

std::string curve_scan_to_csv(const experiments::CurveScan& scan) {
  std::string out = "p,D,scheme,trace,samples,seed,max_ratio,mean_ratio,min_ratio,max_Q,status\n";
  for (const auto& r : scan.rows) {
    out += format_double(scan.p) + "," + std::to_string(r.D) + "," + to_string(r.scheme) + "," +
           to_string(r.trace) + "," + std::to_string(r.samples) + "," + std::to_string(r.seed) +
           "," + format_double(r.max_ratio) + "," + format_double(r.mean_ratio) + "," +
           format_double(r.min_ratio) + "," + format_double(r.max_Q) + "," + status(r.error) + "\n";
  }
  return out;
}

Json depth_probe_to_json(const experiments::DepthProbeReport& r) {
  const auto& c = r.config;
  Json j;
  j["note"] = std::string(experiments::kTrendNote);
  j["p"] = r.p;
  j["N"] = c.N;
  j["D"] = c.D;
  j["scheme"] = to_string(c.scheme);
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["grid"] = {{"box", box_to_json(c.grid.box)},
               {"n", c.grid.n},
               {"placement", c.grid.placement == sobolev::Placement::bilinear ? "bilinear" : "snap"}};
  j["epsilon_schedule"] = c.grid.solver.epsilon_schedule;
  j["tol"] = solver_config_to_json(c.grid.solver);
  j["rho"] = r.rho;
  j["h_D"] = r.h_D;
  j["lambda"] = r.lambda;
  j["rigidity_report"] = solve_report_to_json(r.rigidity_report);
  Json ws = Json::array();
  for (const auto& w : r.witnesses) {
    Json pts = Json::array();
    for (const auto& q : w.points) pts.push_back({q.x, q.y});
    ws.push_back({{"points", std::move(pts)},
                  {"h", w.h},
                  {"best_angle", w.best_angle},
                  {"max_snap_distance", w.max_snap_distance},
                  {"iterations", w.iterations},
                  {"status", status(w.error)}});
  }
  j["witnesses"] = std::move(ws);
  j["all_ok"] = r.all_ok();
  return j;
}

}  // namespace sobext::io
