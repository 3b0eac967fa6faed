#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "sobext/besov.hpp"
#include "sobext/core.hpp"
#include "sobext/errors.hpp"
#include "sobext/experiments.hpp"
#include "sobext/io.hpp"
#include "sobext/sobolev.hpp"

namespace py = pybind11;
using namespace sobext;
namespace ex = sobext::experiments;

namespace {

using XY = std::pair<double, double>;

std::vector<XY> to_pairs(const std::vector<core::Point2>& pts) {
  std::vector<XY> out;
  out.reserve(pts.size());
  for (const auto& q : pts) out.emplace_back(q.x, q.y);
  return out;
}

core::PlanarSet custom_set(const std::vector<XY>& pts) {
  core::PlanarSet s;
  for (const auto& [x, y] : pts) s.points.push_back({x, y});
  return s;
}

sobolev::GridConfig grid_config(int n, const sobolev::Box& box, const std::string& placement) {
  sobolev::GridConfig cfg;
  cfg.n = n;
  cfg.box = box;
  if (placement == "bilinear")
    cfg.placement = sobolev::Placement::bilinear;
  else if (placement == "snap")
    cfg.placement = sobolev::Placement::snap;
  else
    throw DomainError("unknown placement: " + placement);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_sobext, m) {
  m.doc() = "Discrete Besov energies, minimal W^{2,p} extensions and scaling scans.";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  // core
  py::class_<core::Exponents>(m, "Exponents")
      .def_property_readonly("p", &core::Exponents::p)
      .def_property_readonly("alpha", &core::Exponents::alpha)
      .def("curve_height", &core::Exponents::curve_height, py::arg("x"))
      .def("__repr__", [](const core::Exponents& e) {
        return "Exponents(p=" + io::format_double(e.p()) + ", alpha=" + io::format_double(e.alpha()) + ")";
      });
  m.def("make_exponents", &core::make_exponents, py::arg("p"));

  py::class_<core::PlanarSet>(m, "PlanarSet")
      .def(py::init(&custom_set), py::arg("points"))
      .def_property_readonly("kind", [](const core::PlanarSet& s) { return core::to_string(s.kind); })
      .def_readonly("p", &core::PlanarSet::p)
      .def_property_readonly("points", [](const core::PlanarSet& s) { return to_pairs(s.points); })
      .def("__len__", [](const core::PlanarSet& s) { return s.points.size(); })
      .def("to_json", [](const core::PlanarSet& s) { return io::set_to_json(s).dump(); });

  m.def("generate_dyadic_set",
        [](double p, int N) { return core::generate_dyadic_set(core::make_exponents(p), N); },
        py::arg("p"), py::arg("N"));
  m.def("curve_subset",
        [](double p, const std::vector<double>& params) {
          return core::curve_subset(core::make_exponents(p), params).to_planar();
        },
        py::arg("p"), py::arg("params"));
  m.def("inner_ball_count",
        [](double p, int N) { return core::inner_ball_count(core::make_exponents(p), N); },
        py::arg("p"), py::arg("N"));

  // besov
  py::class_<besov::SlopeData>(m, "SlopeData")
      .def_readonly("neighbor", &besov::SlopeData::neighbor)
      .def_readonly("slopes", &besov::SlopeData::slopes)
      .def_readonly("gaps", &besov::SlopeData::gaps)
      .def_readonly("second_order", &besov::SlopeData::second_order);

  py::class_<besov::EnergyReport>(m, "EnergyReport")
      .def_readonly("p", &besov::EnergyReport::p)
      .def_readonly("K", &besov::EnergyReport::K)
      .def_readonly("Q", &besov::EnergyReport::Q)
      .def_readonly("second_order_part", &besov::EnergyReport::second_order_part)
      .def_readonly("pair_part", &besov::EnergyReport::pair_part);

  m.def("slope_data",
        [](const std::vector<double>& sites, const std::vector<double>& values) {
          return besov::slope_data(besov::make_sites(sites), besov::TraceData{values});
        },
        py::arg("sites"), py::arg("values"));
  m.def("besov_energy",
        [](const std::vector<double>& sites, const std::vector<double>& values, double p) {
          return besov::besov_energy(besov::make_sites(sites), besov::TraceData{values},
                                     core::make_exponents(p));
        },
        py::arg("sites"), py::arg("values"), py::arg("p"));
  m.def("interaction_weight",
        [](const std::vector<double>& sites, std::size_t k, std::size_t l, double p) {
          return besov::interaction_weight(besov::make_sites(sites), k, l, core::make_exponents(p));
        },
        py::arg("sites"), py::arg("k"), py::arg("l"), py::arg("p"));
  m.def("rectangle_weight", &besov::rectangle_weight, py::arg("a"), py::arg("b"), py::arg("c"),
        py::arg("d"), py::arg("p"));

  py::class_<besov::PiecewiseCurve>(m, "PiecewiseCurve")
      .def(py::init([](std::vector<double> breakpoints, std::vector<besov::PiecewiseCurve::Cubic> pieces,
                       XY left, XY right) {
             return besov::PiecewiseCurve(std::move(breakpoints), std::move(pieces),
                                          {left.first, left.second}, {right.first, right.second});
           }),
           py::arg("breakpoints"), py::arg("pieces"), py::arg("left_tail"), py::arg("right_tail"),
           "Pieces are local cubic coefficients c0..c3 in (s - t_i); tails are (slope, intercept).")
      .def_property_readonly("breakpoints",
                             [](const besov::PiecewiseCurve& c) {
                               return std::vector<double>(c.breakpoints().begin(), c.breakpoints().end());
                             })
      .def("value", &besov::PiecewiseCurve::value, py::arg("s"))
      .def("derivative", &besov::PiecewiseCurve::derivative, py::arg("s"))
      .def("max_derivative_jump", &besov::PiecewiseCurve::max_derivative_jump)
      .def("to_json", [](const besov::PiecewiseCurve& c) { return io::curve_to_json(c).dump(); });

  m.def("hermite_extend",
        [](const std::vector<double>& sites, const std::vector<double>& values) {
          const auto s = besov::make_sites(sites);
          const besov::TraceData tr{values};
          return besov::hermite_extend(s, tr, besov::slope_data(s, tr));
        },
        py::arg("sites"), py::arg("values"));

  py::class_<besov::BesovIntegral>(m, "BesovIntegral")
      .def_readonly("value", &besov::BesovIntegral::value)
      .def_readonly("error_estimate", &besov::BesovIntegral::error_estimate)
      .def_readonly("infinite", &besov::BesovIntegral::infinite)
      .def_readonly("regions", &besov::BesovIntegral::regions);

  m.def("continuous_besov",
        [](const besov::PiecewiseCurve& c, double p, double rel_tol, std::size_t max_regions) {
          besov::QuadratureConfig qc;
          qc.rel_tol = rel_tol;
          qc.max_regions = max_regions;
          return besov::continuous_besov(c, core::make_exponents(p), qc);
        },
        py::arg("curve"), py::arg("p"), py::arg("rel_tol") = 1e-9, py::arg("max_regions") = 400000,
        py::call_guard<py::gil_scoped_release>());

  // sobolev
  py::class_<sobolev::Box>(m, "Box")
      .def(py::init([](double x0, double x1, double y0, double y1) { return sobolev::Box{x0, x1, y0, y1}; }),
           py::arg("x_min") = -1.0, py::arg("x_max") = 2.0, py::arg("y_min") = -1.0, py::arg("y_max") = 2.0)
      .def_readwrite("x_min", &sobolev::Box::x_min)
      .def_readwrite("x_max", &sobolev::Box::x_max)
      .def_readwrite("y_min", &sobolev::Box::y_min)
      .def_readwrite("y_max", &sobolev::Box::y_max);

  py::class_<sobolev::StageRecord>(m, "StageRecord")
      .def_readonly("epsilon", &sobolev::StageRecord::epsilon)
      .def_readonly("smoothed_value", &sobolev::StageRecord::smoothed_value)
      .def_readonly("norm", &sobolev::StageRecord::norm)
      .def_readonly("iterations", &sobolev::StageRecord::iterations);

  py::class_<sobolev::SolveReport>(m, "SolveReport")
      .def_readonly("norm_estimate", &sobolev::SolveReport::norm_estimate)
      .def_readonly("smoothed_value", &sobolev::SolveReport::smoothed_value)
      .def_readonly("iterations", &sobolev::SolveReport::iterations)
      .def_readonly("final_epsilon", &sobolev::SolveReport::final_epsilon)
      .def_readonly("first_order_residual", &sobolev::SolveReport::first_order_residual)
      .def_readonly("constraint_residual", &sobolev::SolveReport::constraint_residual)
      .def_readonly("stages", &sobolev::SolveReport::stages)
      .def_readonly("snap_distances", &sobolev::SolveReport::snap_distances)
      .def("to_json", [](const sobolev::SolveReport& r) { return io::solve_report_to_json(r).dump(); });

  m.def("solve_problem",
        [](const std::string& problem_json) {
          const auto problem = io::problem_from_json(io::Json::parse(problem_json));
          sobolev::SolveResult res;
          {
            py::gil_scoped_release release;
            res = sobolev::solve_min_extension(problem);
          }
          return py::make_tuple(problem.grid.n(), std::move(res.field.values), std::move(res.report));
        },
        py::arg("problem_json"),
        "Solve a grid problem given in the JSON problem format; returns (n, values, report) with "
        "values in row-major order, x fastest.");

  m.def("rigidity_constant",
        [](double p, const std::vector<XY>& points, int n, const sobolev::Box& box,
           const std::string& placement) {
          const auto cfg = grid_config(n, box, placement);
          const auto set = custom_set(points);
          const auto e = core::make_exponents(p);
          sobolev::RigidityResult r;
          {
            py::gil_scoped_release release;
            r = sobolev::rigidity_constant(e, set, cfg);
          }
          return py::make_tuple(r.rho, std::move(r.report));
        },
        py::arg("p"), py::arg("points"), py::arg("n") = 129, py::arg("box") = sobolev::Box{},
        py::arg("placement") = "bilinear", "Returns (rho, report).");

  m.def("witness_norm",
        [](double p, const std::vector<XY>& points, int n, const sobolev::Box& box,
           const std::string& placement, const std::vector<double>& angles) {
          const auto cfg = grid_config(n, box, placement);
          const auto set = custom_set(points);
          const auto e = core::make_exponents(p);
          sobolev::WitnessResult w;
          {
            py::gil_scoped_release release;
            w = sobolev::witness_norm(e, set, cfg, angles);
          }
          return py::make_tuple(w.h, w.best_angle, std::move(w.report));
        },
        py::arg("p"), py::arg("points"), py::arg("n") = 129, py::arg("box") = sobolev::Box{},
        py::arg("placement") = "bilinear", py::arg("angles") = std::vector<double>{},
        "Returns (h, best_angle, report).");

  // experiments
  py::class_<ex::LinearFit>(m, "LinearFit")
      .def_readonly("slope", &ex::LinearFit::slope)
      .def_readonly("intercept", &ex::LinearFit::intercept)
      .def_readonly("r2", &ex::LinearFit::r2);

  py::class_<ex::DyadicScan>(m, "DyadicScan")
      .def_readonly("p", &ex::DyadicScan::p)
      .def_readonly("fit", &ex::DyadicScan::fit)
      .def_property_readonly("N", [](const ex::DyadicScan& s) {
        std::vector<int> v;
        for (const auto& r : s.rows) v.push_back(r.N);
        return v;
      })
      .def_property_readonly("Q", [](const ex::DyadicScan& s) {
        std::vector<double> v;
        for (const auto& r : s.rows) v.push_back(r.energy.Q);
        return v;
      })
      .def_property_readonly("lower_bound", [](const ex::DyadicScan& s) {
        std::vector<double> v;
        for (const auto& r : s.rows) v.push_back(r.lower_bound);
        return v;
      })
      .def("all_ok", &ex::DyadicScan::all_ok)
      .def("to_csv", &io::dyadic_scan_to_csv)
      .def("summary_json", [](const ex::DyadicScan& s) { return io::dyadic_scan_summary(s).dump(); });

  m.def("dyadic_scaling_scan",
        [](double p, const std::vector<int>& N_values, unsigned threads) {
          return ex::dyadic_scaling_scan(core::make_exponents(p), N_values, {threads});
        },
        py::arg("p"), py::arg("N_values"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<ex::CurveScan>(m, "CurveScan")
      .def_readonly("p", &ex::CurveScan::p)
      .def_property_readonly("D", [](const ex::CurveScan& s) {
        std::vector<int> v;
        for (const auto& r : s.rows) v.push_back(r.D);
        return v;
      })
      .def_property_readonly("max_ratio", [](const ex::CurveScan& s) {
        std::vector<double> v;
        for (const auto& r : s.rows) v.push_back(r.max_ratio);
        return v;
      })
      .def("all_ok", &ex::CurveScan::all_ok)
      .def("to_csv", &io::curve_scan_to_csv);

  m.def("curve_bound_scan",
        [](double p, const std::vector<int>& D_values, int samples, const std::string& scheme,
           std::uint64_t seed, const std::string& trace, unsigned threads) {
          return ex::curve_bound_scan(core::make_exponents(p), D_values, samples,
                                      ex::scheme_from_string(scheme), seed,
                                      ex::trace_kind_from_string(trace), {threads});
        },
        py::arg("p"), py::arg("D_values"), py::arg("samples") = 100, py::arg("scheme") = "uniform",
        py::arg("seed") = 0, py::arg("trace") = "power", py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<ex::DepthProbeReport>(m, "DepthProbeReport")
      .def_readonly("p", &ex::DepthProbeReport::p)
      .def_readonly("rho", &ex::DepthProbeReport::rho)
      .def_readonly("h_D", &ex::DepthProbeReport::h_D)
      .def_readonly("lambda_", &ex::DepthProbeReport::lambda)
      .def("all_ok", &ex::DepthProbeReport::all_ok)
      .def("to_json", [](const ex::DepthProbeReport& r) { return io::depth_probe_to_json(r).dump(); });

  m.def("depth_probe",
        [](double p, int N, int D, int n, const std::string& scheme, std::uint64_t seed, int samples,
           const sobolev::Box& box, const std::string& placement, unsigned threads) {
          ex::DepthProbeConfig cfg;
          cfg.N = N;
          cfg.D = D;
          cfg.grid = grid_config(n, box, placement);
          cfg.scheme = ex::subset_scheme_from_string(scheme);
          cfg.seed = seed;
          cfg.samples = samples;
          cfg.options.threads = threads;
          py::gil_scoped_release release;
          return ex::depth_probe(core::make_exponents(p), cfg);
        },
        py::arg("p"), py::arg("N") = 8, py::arg("D") = 4, py::arg("n") = 129,
        py::arg("scheme") = "dyadic-subset", py::arg("seed") = 0, py::arg("samples") = 1,
        py::arg("box") = sobolev::Box{}, py::arg("placement") = "bilinear", py::arg("threads") = 0);

  m.attr("TREND_NOTE") = std::string(ex::kTrendNote);
}
