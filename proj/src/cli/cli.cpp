#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "sobext/cli.hpp"
#include "sobext/errors.hpp"
#include "sobext/io.hpp"

namespace sobext::cli {

namespace {

using io::Json;

struct Paths {
  std::string primary;     // main output file, empty for stdout
  std::string config_out;  // explicit --config-out
};

// Writes `content` to `path`, or to `out` when no path was given.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty())
    out << content;
  else
    io::write_file(path, content);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

bool is_flag(const CLI::Option* opt) { return opt->get_expected_min() == 0; }

// Full resolved option set of a parsed subcommand: given values, or defaults.
Json resolved_config(const CLI::App& sub) {
  Json opts = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config-out") continue;
    const std::string& name = names.front();
    if (is_flag(opt)) {
      opts[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      opts[name] = opt->results();
    } else if (!opt->get_default_str().empty()) {
      // vector defaults render as "[a,b]" or "{}" when empty
      std::string d = opt->get_default_str();
      std::vector<std::string> vals;
      if (d.front() == '[' || d.front() == '{') {
        std::stringstream ss(d.substr(1, d.size() - 2));
        for (std::string item; std::getline(ss, item, ',');)
          if (!item.empty()) vals.push_back(item);
      } else {
        vals.push_back(d);
      }
      if (!vals.empty()) opts[name] = vals;
    }
  }
  return Json{{"command", sub.get_name()}, {"options", std::move(opts)}};
}

// argv for a stored configuration; options named in `overrides` are left out.
std::vector<std::string> argv_from_config(const Json& cfg, const std::vector<std::string>& overrides) {
  std::set<std::string> skip;
  for (const auto& a : overrides)
    if (a.rfind("--", 0) == 0) skip.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  std::vector<std::string> argv{cfg.at("command").get<std::string>()};
  for (const auto& [name, value] : cfg.at("options").items()) {
    if (skip.count(name)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) argv.push_back("--" + name);
      continue;
    }
    argv.push_back("--" + name);
    for (const auto& v : value) argv.push_back(v.get<std::string>());
  }
  argv.insert(argv.end(), overrides.begin(), overrides.end());
  return argv;
}

sobolev::Box box_from_list(const std::vector<double>& b) {
  if (b.size() != 4) throw DomainError("--box takes four numbers: x_min x_max y_min y_max");
  return {b[0], b[1], b[2], b[3]};
}

sobolev::Placement placement_from_string(const std::string& s) {
  if (s == "bilinear") return sobolev::Placement::bilinear;
  if (s == "snap") return sobolev::Placement::snap;
  throw DomainError("unknown placement '" + s + "'");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  return path.empty() ? std::string() : path + suffix;
}

// Trace CSV with header "s,value", or bare sites with header "s" (trace s^(1+alpha)).
io::Trace load_trace(const std::string& path, const core::Exponents& e) {
  const std::string text = io::read_file(path);
  const auto first = text.substr(0, text.find('\n'));
  std::string header;
  for (char c : first)
    if (c != ' ' && c != '\t' && c != '\r') header += c;
  if (header == "s") {
    io::Trace t;
    for (const auto& r : io::parse_csv(text, {"s"})) {
      if (r[0] < 0.0) throw DomainError("sites without values must be non-negative");
      t.sites.push_back(r[0]);
      t.values.push_back(e.curve_height(r[0]));
    }
    return t;
  }
  try {
    return io::trace_from_csv(text);
  } catch (const IoError& ex) {
    throw IoError("'" + path + "': " + ex.what());
  }
}

// Sorts (site, value) pairs together.
std::pair<besov::SiteSet, besov::TraceData> sorted_trace(const io::Trace& t) {
  std::vector<std::size_t> order(t.sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.sites[a] < t.sites[b]; });
  std::vector<double> s;
  besov::TraceData tr;
  for (auto i : order) {
    s.push_back(t.sites[i]);
    tr.values.push_back(t.values[i]);
  }
  return {besov::make_sites(s), std::move(tr)};
}

std::vector<int> expand_range(int lo, int hi, int step) {
  if (step < 1) throw DomainError("--N-step must be positive");
  if (hi < lo) throw DomainError("--N-max must not be below --N-min");
  std::vector<int> out;
  for (int n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

struct Options {
  double p = 4.0;
  int N = 0;
  int D = 4;
  int grid = 129;
  std::vector<double> box{-1.0, 2.0, -1.0, 2.0};
  std::string placement = "bilinear";
  std::string out;
  std::string format;
  std::string sites;
  std::string report;
  std::string field_out;
  std::string problem;
  std::string summary;
  bool quadrature = false;
  double rel_tol = 1e-9;
  int N_min = 0, N_max = 0, N_step = 1;
  std::vector<int> N_list;
  std::vector<int> D_list;
  int samples = 100;
  std::string scheme;
  std::string trace = "power";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string config_out;
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = raw_args;

  CLI::App app{"Finite-set Besov energies and minimal-norm grid extensions", "sobext"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string config_in;
  app.add_option("--config", config_in,
                 "Re-run from a resolved-config JSON written by an earlier run; later flags override it");

  Options o;
  Paths paths;
  std::function<void()> action;

  auto add_threads = [&](CLI::App* s) {
    s->add_option("--threads", o.threads, "Worker threads for independent rows (0: all processors)")
        ->capture_default_str();
  };
  auto add_config_out = [&](CLI::App* s) {
    s->add_option("--config-out", o.config_out,
                  "Where to write the resolved configuration (default: <output>.config.json)");
  };
  auto add_grid = [&](CLI::App* s) {
    s->add_option("--grid", o.grid, "Grid nodes per side")->capture_default_str();
    s->add_option("--box", o.box, "Square box x_min x_max y_min y_max")->expected(4)->capture_default_str();
    s->add_option("--placement", o.placement, "Located constraints: bilinear or snap")
        ->check(CLI::IsMember({"bilinear", "snap"}))
        ->capture_default_str();
  };
  auto grid_config = [&] {
    sobolev::GridConfig g;
    g.box = box_from_list(o.box);
    g.n = o.grid;
    g.placement = placement_from_string(o.placement);
    return g;
  };

  // gen-set
  auto* gen = app.add_subcommand("gen-set", "Write the dyadic set E_N");
  gen->add_option("--p", o.p, "Exponent p > 2")->capture_default_str();
  gen->add_option("--N", o.N, "Depth N >= 2")->required();
  gen->add_option("--out", o.out, "Output file (.json or .csv); default: CSV on stdout");
  gen->add_option("--format", o.format, "json or csv (default: from the file extension)")
      ->check(CLI::IsMember({"json", "csv"}));
  add_config_out(gen);
  gen->callback([&] {
    paths.primary = o.out;
    action = [&] {
      const auto e = core::make_exponents(o.p);
      const auto set = core::generate_dyadic_set(e, o.N);
      std::string fmt = o.format;
      if (fmt.empty()) fmt = (o.out.size() >= 5 && o.out.substr(o.out.size() - 5) == ".json") ? "json" : "csv";
      emit(o.out, fmt == "json" ? dump(io::set_to_json(set)) : io::set_to_csv(set), out);
    };
  });

  // besov
  auto* bes = app.add_subcommand("besov", "Discrete trace energy Q of a finite trace");
  bes->add_option("--sites", o.sites, "CSV with header s,value (or s alone for the trace s^(1+alpha))")
      ->required();
  bes->add_option("--p", o.p, "Exponent p > 2")->capture_default_str();
  bes->add_option("--report", o.report, "EnergyReport JSON output; default stdout");
  add_config_out(bes);
  bes->callback([&] {
    paths.primary = o.report;
    action = [&] {
      const auto e = core::make_exponents(o.p);
      const auto [sites, trace] = sorted_trace(load_trace(o.sites, e));
      emit(o.report, dump(io::energy_report_to_json(besov::besov_energy(sites, trace, e))), out);
    };
  });

  // extend1d
  auto* ext = app.add_subcommand("extend1d", "C^1 piecewise-cubic extension of a trace");
  ext->add_option("--sites", o.sites, "CSV with header s,value (or s alone)")->required();
  ext->add_option("--p", o.p, "Exponent p > 2")->capture_default_str();
  ext->add_flag("--quadrature", o.quadrature, "Also integrate the continuous seminorm of the extension");
  ext->add_option("--rel-tol", o.rel_tol, "Quadrature relative tolerance")->capture_default_str();
  ext->add_option("--out", o.out, "Curve JSON output; default stdout");
  add_config_out(ext);
  ext->callback([&] {
    paths.primary = o.out;
    action = [&] {
      const auto e = core::make_exponents(o.p);
      const auto [sites, trace] = sorted_trace(load_trace(o.sites, e));
      const auto slopes = besov::slope_data(sites, trace);
      const auto curve = besov::hermite_extend(sites, trace, slopes);
      Json j;
      j["p"] = o.p;
      j["curve"] = io::curve_to_json(curve);
      const auto energy = besov::besov_energy(sites, trace, e);
      j["energy"] = io::energy_report_to_json(energy);
      if (o.quadrature) {
        besov::QuadratureConfig qc;
        qc.rel_tol = o.rel_tol;
        const auto integral = besov::continuous_besov(curve, e, qc);
        j["continuous"] = io::integral_to_json(integral);
        if (!integral.infinite && energy.Q > 0.0) j["ratio_to_Q"] = integral.value / energy.Q;
      }
      emit(o.out, dump(j), out);
    };
  });

  // dyadic-scan
  auto* dys = app.add_subcommand("dyadic-scan", "Q on dyadic sites against N, with a linear fit");
  dys->add_option("--p", o.p, "Exponent p > 2")->capture_default_str();
  dys->add_option("--N-min", o.N_min, "Smallest N (>= 4)");
  dys->add_option("--N-max", o.N_max, "Largest N");
  dys->add_option("--N-step", o.N_step, "Step between N values")->capture_default_str();
  dys->add_option("--N-list", o.N_list, "Explicit N values (instead of the range)");
  dys->add_option("--out", o.out, "CSV output; default stdout");
  dys->add_option("--summary", o.summary, "Fit summary JSON (default: <out>.summary.json, or stderr)");
  add_threads(dys);
  add_config_out(dys);
  dys->callback([&] {
    paths.primary = o.out;
    action = [&] {
      std::vector<int> Ns = o.N_list;
      if (Ns.empty()) {
        if (o.N_min == 0 || o.N_max == 0) throw DomainError("give --N-min and --N-max, or --N-list");
        Ns = expand_range(o.N_min, o.N_max, o.N_step);
      }
      const auto e = core::make_exponents(o.p);
      const auto scan = experiments::dyadic_scaling_scan(e, Ns, {o.threads});
      emit(o.out, io::dyadic_scan_to_csv(scan), out);
      const std::string summary = o.summary.empty() ? with_suffix(o.out, ".summary.json") : o.summary;
      if (summary.empty())
        err << dump(io::dyadic_scan_summary(scan));
      else
        io::write_file(summary, dump(io::dyadic_scan_summary(scan)));
      if (!scan.all_ok()) throw NumericalError("some rows failed; see the status column");
    };
  });

  // curve-scan
  auto* cvs = app.add_subcommand("curve-scan", "Q / D^2 over sampled curve subsets");
  cvs->add_option("--p", o.p, "Exponent p > 2")->capture_default_str();
  cvs->add_option("--D", o.D_list, "Subset sizes (>= 2)")->required();
  cvs->add_option("--samples", o.samples, "Subsets per size")->capture_default_str();
  cvs->add_option("--scheme", o.scheme, "uniform, random or clustered")
      ->required()
      ->check(CLI::IsMember({"uniform", "random", "clustered"}));
  cvs->add_option("--seed", o.seed, "Random seed")->required();
  cvs->add_option("--trace", o.trace, "power (s^(1+alpha)) or affine (diagnostic)")
      ->check(CLI::IsMember({"power", "affine"}))
      ->capture_default_str();
  cvs->add_option("--out", o.out, "CSV output; default stdout");
  add_threads(cvs);
  add_config_out(cvs);
  cvs->callback([&] {
    paths.primary = o.out;
    action = [&] {
      const auto e = core::make_exponents(o.p);
      const auto scan = experiments::curve_bound_scan(e, o.D_list, o.samples,
                                                      experiments::scheme_from_string(o.scheme), o.seed,
                                                      experiments::trace_kind_from_string(o.trace),
                                                      {o.threads});
      emit(o.out, io::curve_scan_to_csv(scan), out);
      if (!scan.all_ok()) throw NumericalError("some rows failed; see the status column");
    };
  });

  // solve2d
  auto* s2d = app.add_subcommand("solve2d", "Minimal-norm grid extension from a problem file");
  s2d->add_option("--problem", o.problem, "Problem JSON")->required();
  s2d->add_option("--field-out", o.field_out, "Field CSV x,y,value");
  s2d->add_option("--report", o.report, "SolveReport JSON; default stdout");
  add_config_out(s2d);
  s2d->callback([&] {
    paths.primary = o.report.empty() ? o.field_out : o.report;
    action = [&] {
      const auto text = io::read_file(o.problem);
      Json j;
      try {
        j = Json::parse(text);
      } catch (const nlohmann::json::exception& ex) {
        throw IoError("'" + o.problem + "': " + ex.what());
      }
      const auto problem = io::problem_from_json(j);
      const auto result = sobolev::solve_min_extension(problem);
      if (!o.field_out.empty()) io::write_file(o.field_out, io::field_to_csv(problem.grid, result.field));
      emit(o.report, dump(io::solve_report_to_json(result.report)), out);
    };
  });

  // rigidity
  auto* rig = app.add_subcommand("rigidity", "Rigidity constant of E_N on a grid");
  rig->add_option("--p", o.p, "Exponent p > 2")->capture_default_str();
  rig->add_option("--N", o.N, "Depth N >= 2")->required();
  add_grid(rig);
  rig->add_option("--report", o.report, "Report JSON; default stdout");
  rig->add_option("--field-out", o.field_out, "Minimiser as CSV x,y,value");
  add_config_out(rig);
  rig->callback([&] {
    paths.primary = o.report;
    action = [&] {
      const auto e = core::make_exponents(o.p);
      const auto g = grid_config();
      const auto res = sobolev::rigidity_constant(e, core::generate_dyadic_set(e, o.N), g);
      Json j;
      j["p"] = o.p;
      j["N"] = o.N;
      j["grid"] = {{"box", io::box_to_json(g.box)}, {"n", g.n}, {"placement", o.placement}};
      j["rho"] = res.rho;
      j["report"] = io::solve_report_to_json(res.report);
      if (!o.field_out.empty())
        io::write_file(o.field_out, io::field_to_csv(sobolev::build_grid(g.box, g.n), res.field));
      emit(o.report, dump(j), out);
    };
  });

  // depth-probe
  auto* dp = app.add_subcommand("depth-probe", "Empirical lower bound rho_N / (1 + h_D)");
  dp->add_option("--p", o.p, "Exponent p > 2")->capture_default_str();
  dp->add_option("--N", o.N, "Depth N >= 4")->required();
  dp->add_option("--D", o.D, "Subset size D >= 1")->required();
  add_grid(dp);
  dp->add_option("--seed", o.seed, "Random seed")->required();
  dp->add_option("--samples", o.samples, "Sampled D-subsets")->default_val(1);
  dp->add_option("--scheme", o.scheme, "dyadic-subset, uniform, random or clustered")
      ->check(CLI::IsMember({"dyadic-subset", "uniform", "random", "clustered"}))
      ->default_val("dyadic-subset");
  dp->add_option("--report", o.report, "Report JSON; default stdout");
  add_threads(dp);
  add_config_out(dp);
  dp->callback([&] {
    paths.primary = o.report;
    action = [&] {
      const auto e = core::make_exponents(o.p);
      experiments::DepthProbeConfig cfg;
      cfg.N = o.N;
      cfg.D = o.D;
      cfg.grid = grid_config();
      cfg.scheme = experiments::subset_scheme_from_string(o.scheme);
      cfg.seed = o.seed;
      cfg.samples = o.samples;
      cfg.options.threads = o.threads;
      const auto rep = experiments::depth_probe(e, cfg);
      emit(o.report, dump(io::depth_probe_to_json(rep)), out);
      if (!rep.all_ok()) throw NumericalError("some witness samples failed; see their status");
    };
  });

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!args.empty() && (args[0] == "--config" || args[0].rfind("--config=", 0) == 0)) {
      std::string path;
      std::size_t rest = 1;
      if (args[0] == "--config") {
        if (args.size() < 2) throw CLI::ArgumentMismatch("--config needs a path");
        path = args[1];
        rest = 2;
      } else {
        path = args[0].substr(9);
      }
      Json cfg;
      try {
        cfg = Json::parse(io::read_file(path));
        args = argv_from_config(cfg, {args.begin() + static_cast<std::ptrdiff_t>(rest), args.end()});
      } catch (const nlohmann::json::exception& ex) {
        throw IoError("'" + path + "': " + ex.what());
      }
    }
    if (!args.empty() && args[0].rfind("-", 0) != 0) {
      bool known = false;
      for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args[0];
      if (!known) throw CLI::ExtrasError("unknown subcommand '" + args[0] + "'", CLI::ExitCodes::ExtrasError);
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    if (code == 0) return kSuccess;
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << "\n";
    return kFailure;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const Json config = resolved_config(*sub);
  err << "config: " << config.dump() << "\n";
  try {
    const std::string cfg_path = o.config_out.empty() ? with_suffix(paths.primary, ".config.json") : o.config_out;
    if (!cfg_path.empty()) io::write_file(cfg_path, dump(config));
    action();
  } catch (const DomainError& ex) {
    err << "error: " << ex.what() << "\n" << sub->help();
    return kUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kFailure;
  }
  err << "elapsed: " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
      << " s\n";
  return kSuccess;
}

}  // namespace sobext::cli
