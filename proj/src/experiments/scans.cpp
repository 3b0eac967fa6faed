#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "sobext/errors.hpp"
#include "sobext/experiments.hpp"
#include "sobext/numeric.hpp"

namespace sobext::experiments {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double power_trace(const core::Exponents& e, double s) { return e.curve_height(s); }

double affine_trace(double s) { return 2.0 * s - 0.5; }

void fill_dyadic_row(const core::Exponents& e, DyadicRow& row) {
  const int N = row.N;
  std::vector<double> s(static_cast<std::size_t>(N));
  for (int k = 1; k <= N; ++k) s[k - 1] = std::ldexp(1.0, k - N);
  const auto sites = besov::make_sites(s);
  besov::TraceData trace;
  trace.values.reserve(s.size());
  for (double x : s) trace.values.push_back(power_trace(e, x));

  row.energy = besov::besov_energy(sites, trace, e);
  row.lower_bound = dyadic_lower_bound(e, N, N);
  // Site 1 has its right neighbour nearest; every later site uses the left one.
  const auto sd = besov::slope_data(sites, trace);
  for (int i = 2; i <= N; ++i) {
    const double exact = dyadic_slope(e, i, N);
    const double got = sd.slopes[static_cast<std::size_t>(i - 1)];
    row.slope_mismatch = std::max(row.slope_mismatch, std::fabs(got - exact) / std::fabs(exact));
  }
}

void fill_curve_row(const core::Exponents& e, CurveRow& row) {
  const double d2 = static_cast<double>(row.D) * row.D;
  row.min_ratio = INFINITY;
  CompensatedSum total;
  for (int j = 0; j < row.samples; ++j) {
    const auto s = sample_params(row.scheme, row.D, 0.0, row.seed, j);
    const auto sites = besov::make_sites(s);
    besov::TraceData tr;
    tr.values.reserve(s.size());
    for (double x : s)
      tr.values.push_back(row.trace == TraceKind::power ? power_trace(e, x) : affine_trace(x));
    const double Q = besov::besov_energy(sites, tr, e).Q;
    row.max_Q = std::max(row.max_Q, Q);
    row.max_ratio = std::max(row.max_ratio, Q / d2);
    row.min_ratio = std::min(row.min_ratio, Q / d2);
    total.add(Q / d2);
  }
  row.mean_ratio = total.value() / row.samples;
}

}  // namespace

double dyadic_slope(const core::Exponents& e, int i, int N) {
  const double a = e.alpha();
  return (2.0 - std::exp2(-a)) * std::exp2(static_cast<double>(i - N) * a);
}

double dyadic_lower_bound(const core::Exponents& e, int N, int K) {
  const double p = e.p();
  const double c = std::exp2(-p - 1.0);
  CompensatedSum sum;
  for (int k = 2; k <= K - 1; ++k) {
    const double mk = dyadic_slope(e, k, N);
    for (int l = k + 1; l <= K; ++l) {
      const double diff = std::fabs(mk - dyadic_slope(e, l, N));
      const double w = c * std::exp2(-static_cast<double>(l - N) * p + (k - N) + (l - N));
      sum.add(std::pow(diff, p) * w);
    }
  }
  return sum.value();
}

DyadicScan dyadic_scaling_scan(const core::Exponents& e, std::span<const int> N_values,
                               const ScanOptions& opts) {
  for (int N : N_values)
    if (N < 4 || N > 1000) throw DomainError("dyadic_scaling_scan: N must lie in [4, 1000]");
  DyadicScan scan;
  scan.p = e.p();
  scan.rows.resize(N_values.size());
  parallel_for(N_values.size(), opts.threads, [&](std::size_t r) {
    const auto t0 = std::chrono::steady_clock::now();
    DyadicRow row;
    row.N = N_values[r];
    try {
      fill_dyadic_row(e, row);
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    row.runtime_s = seconds_since(t0);
    scan.rows[r] = std::move(row);
  });
  {
    std::vector<double> x, y;
    for (const auto& row : scan.rows) {
      if (!row.error.empty()) continue;
      x.push_back(row.N);
      y.push_back(row.energy.Q);
    }
    if (x.size() >= 2) scan.fit = fit_line(x, y);
  }
  return scan;
}

bool DyadicScan::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const DyadicRow& r) { return r.error.empty(); });
}

bool CurveScan::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const CurveRow& r) { return r.error.empty(); });
}

bool DepthProbeReport::all_ok() const {
  return std::all_of(witnesses.begin(), witnesses.end(),
                     [](const WitnessSample& w) { return w.error.empty(); });
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::uniform: return "uniform";
    case Scheme::random: return "random";
    case Scheme::clustered: return "clustered";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "uniform") return Scheme::uniform;
  if (name == "random") return Scheme::random;
  if (name == "clustered") return Scheme::clustered;
  throw DomainError("unknown scheme '" + std::string(name) + "'");
}

const char* to_string(TraceKind t) { return t == TraceKind::power ? "power" : "affine"; }

TraceKind trace_kind_from_string(std::string_view name) {
  if (name == "power") return TraceKind::power;
  if (name == "affine") return TraceKind::affine;
  throw DomainError("unknown trace '" + std::string(name) + "'");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

std::vector<double> sample_params(Scheme scheme, int D, double lo, std::uint64_t seed,
                                  int sample_index) {
  if (D < 1) throw DomainError("sample_params: D must be positive");
  if (!(lo >= 0.0 && lo < 1.0)) throw DomainError("sample_params: lower end must lie in [0, 1)");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(D));
  if (scheme == Scheme::uniform) {
    if (D == 1) return {lo};
    for (int i = 0; i < D; ++i) out.push_back(lo + (1.0 - lo) * i / (D - 1));
    out.back() = 1.0;
    return out;
  }
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(D),
                               static_cast<std::uint64_t>(sample_index)));
  const double a = std::max(lo, std::ldexp(1.0, -D));
  const double log_a = std::log(a);
  while (static_cast<int>(out.size()) < D) {
    const double u = unit_double(rng);
    const double s = scheme == Scheme::random ? lo + (1.0 - lo) * u : std::exp(log_a * (1.0 - u));
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

CurveScan curve_bound_scan(const core::Exponents& e, std::span<const int> D_values, int samples,
                           Scheme scheme, std::uint64_t seed, TraceKind trace,
                           const ScanOptions& opts) {
  if (samples < 1) throw DomainError("curve_bound_scan: samples must be positive");
  for (int D : D_values)
    if (D < 2) throw DomainError("curve_bound_scan: D must be at least 2");
  CurveScan scan;
  scan.p = e.p();
  scan.rows.resize(D_values.size());
  parallel_for(D_values.size(), opts.threads, [&](std::size_t r) {
    const auto t0 = std::chrono::steady_clock::now();
    CurveRow row;
    row.D = D_values[r];
    row.scheme = scheme;
    row.trace = trace;
    row.samples = samples;
    row.seed = seed;
    try {
      fill_curve_row(e, row);
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    row.runtime_s = seconds_since(t0);
    scan.rows[r] = std::move(row);
  });
  return scan;
}

const char* to_string(SubsetScheme s) {
  switch (s) {
    case SubsetScheme::dyadic_subset: return "dyadic-subset";
    case SubsetScheme::uniform: return "uniform";
    case SubsetScheme::random: return "random";
    case SubsetScheme::clustered: return "clustered";
  }
  return "?";
}

SubsetScheme subset_scheme_from_string(std::string_view name) {
  if (name == "dyadic-subset") return SubsetScheme::dyadic_subset;
  if (name == "uniform") return SubsetScheme::uniform;
  if (name == "random") return SubsetScheme::random;
  if (name == "clustered") return SubsetScheme::clustered;
  throw DomainError("unknown subset scheme '" + std::string(name) + "'");
}

std::vector<core::PlanarSet> probe_subsets(const core::Exponents& e, const DepthProbeConfig& cfg) {
  if (cfg.N < 4) throw DomainError("depth_probe: N must be at least 4");
  if (cfg.D < 1) throw DomainError("depth_probe: D must be positive");
  if (cfg.samples < 1) throw DomainError("depth_probe: samples must be positive");
  std::vector<core::PlanarSet> out;
  out.reserve(static_cast<std::size_t>(cfg.samples));
  if (cfg.scheme == SubsetScheme::dyadic_subset) {
    const auto full = core::generate_dyadic_set(e, cfg.N);
    if (static_cast<std::size_t>(cfg.D) > full.points.size())
      throw DomainError("depth_probe: D exceeds the size of E_N");
    for (int j = 0; j < cfg.samples; ++j) {
      // The permutation ignores D, so subsets are nested as D grows.
      std::vector<std::size_t> order(full.points.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(cfg.N) | (1ULL << 40),
                                   static_cast<std::uint64_t>(j)));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
      core::PlanarSet s;
      s.kind = core::SetKind::custom;
      s.p = e.p();
      for (int d = 0; d < cfg.D; ++d) s.points.push_back(full.points[order[d]]);
      std::sort(s.points.begin(), s.points.end(),
                [](const core::Point2& a, const core::Point2& b) { return a.x > b.x; });
      out.push_back(std::move(s));
    }
    return out;
  }
  const Scheme scheme = cfg.scheme == SubsetScheme::uniform  ? Scheme::uniform
                        : cfg.scheme == SubsetScheme::random ? Scheme::random
                                                             : Scheme::clustered;
  const double lo = std::ldexp(1.0, -cfg.N);
  for (int j = 0; j < cfg.samples; ++j) {
    const auto params = sample_params(scheme, cfg.D, lo, cfg.seed, j);
    out.push_back(core::curve_subset(e, params).to_planar());
  }
  return out;
}

DepthProbeReport depth_probe(const core::Exponents& e, const DepthProbeConfig& cfg) {
  const auto subsets = probe_subsets(e, cfg);
  DepthProbeReport rep;
  rep.p = e.p();
  rep.config = cfg;
  const auto full = core::generate_dyadic_set(e, cfg.N);
  const auto rig = sobolev::rigidity_constant(e, full, cfg.grid);
  rep.rho = rig.rho;
  rep.rigidity_report = rig.report;

  rep.witnesses.resize(subsets.size());
  parallel_for(subsets.size(), cfg.options.threads, [&](std::size_t j) {
    WitnessSample ws;
    ws.points = subsets[j].points;
    try {
      const auto w = sobolev::witness_norm(e, subsets[j], cfg.grid, cfg.angles);
      ws.h = w.h;
      ws.best_angle = w.best_angle;
      ws.iterations = w.report.iterations;
      for (double d : w.report.snap_distances)
        ws.max_snap_distance = std::max(ws.max_snap_distance, d);
    } catch (const std::exception& ex) {
      ws.error = ex.what();
    }
    rep.witnesses[j] = std::move(ws);
  });
  for (const auto& w : rep.witnesses)
    if (w.error.empty()) rep.h_D = std::max(rep.h_D, w.h);
  rep.lambda = rep.rho / (1.0 + rep.h_D);
  return rep;
}

}  // namespace sobext::experiments
