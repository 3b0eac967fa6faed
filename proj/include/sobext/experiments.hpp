#pragma once

// Parameter scans over the discrete energies and the grid programs. Rows are
// independent and may run on several threads; results always come back in
// parameter order and do not depend on the thread count.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sobext/besov.hpp"
#include "sobext/core.hpp"
#include "sobext/sobolev.hpp"

namespace sobext::experiments {

/// Header line attached to every report.
inline constexpr std::string_view kTrendNote =
    "constants in the underlying inequalities are unquantified; values support trend "
    "checks only";

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept. Needs at least two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits log y ~ exponent * log x; returns the fit in log-log coordinates.
LinearFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ScanOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Dyadic scaling

/// Nearest-neighbour slope of s^(1+alpha) at site 2^(i-N) when its left
/// neighbour 2^(i-1-N) is nearest: (2 - 2^-alpha) 2^((i-N) alpha).
double dyadic_slope(const core::Exponents& e, int i, int N);

/// Explicit lower bound for the pair part on sites 2^(k-N), k = 1..K:
///   sum_{k=2}^{K-1} sum_{l>k} |m_k - m_l|^p c 2^{-(l-N)p} 2^{k-N} 2^{l-N},
/// with c = 2^{-p-1} (the integrand of each dyadic rectangle is at least
/// 2^{-(l+1-N)p}) and the exact dyadic slopes. Indices are one-based here.
double dyadic_lower_bound(const core::Exponents& e, int N, int K);

struct DyadicRow {
  int N = 0;
  besov::EnergyReport energy;
  double lower_bound = 0.0;
  double slope_mismatch = 0.0;  // max relative gap between dyadic_slope and slope_data
  std::string error;            // empty when the row succeeded
  double runtime_s = 0.0;
};

struct DyadicScan {
  double p = 0.0;
  std::vector<DyadicRow> rows;
  LinearFit fit;  // Q against N, over successful rows
  bool all_ok() const;
};

/// Q on sites {2^(k-N) : k = 1..N} with trace s^(1+alpha), for each N >= 4.
/// A row that fails numerically is kept with its error message.
DyadicScan dyadic_scaling_scan(const core::Exponents& e, std::span<const int> N_values,
                               const ScanOptions& opts = {});

// ---------------------------------------------------------------------------
// Curve subsets

enum class Scheme {
  uniform,   // equispaced on [lo, 1]
  random,    // i.i.d. uniform on [lo, 1], sorted
  clustered  // log-uniform on [max(lo, 2^-D), 1], clustering toward 0
};

const char* to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

enum class TraceKind { power, affine };

const char* to_string(TraceKind t);
TraceKind trace_kind_from_string(std::string_view name);

/// Deterministic stream keyed by (seed, a, b).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// D distinct curve parameters in [lo, 1], ascending.
std::vector<double> sample_params(Scheme scheme, int D, double lo, std::uint64_t seed,
                                  int sample_index);

struct CurveRow {
  int D = 0;
  Scheme scheme = Scheme::uniform;
  TraceKind trace = TraceKind::power;
  int samples = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.0;   // max over samples of Q / D^2
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double max_Q = 0.0;
  std::string error;
  double runtime_s = 0.0;
};

struct CurveScan {
  double p = 0.0;
  std::vector<CurveRow> rows;
  bool all_ok() const;
};

/// For each D, `samples` parameter sets drawn on [0, 1]; trace s^(1+alpha)
/// (or an affine diagnostic trace). Requires D >= 2.
CurveScan curve_bound_scan(const core::Exponents& e, std::span<const int> D_values, int samples,
                           Scheme scheme, std::uint64_t seed,
                           TraceKind trace = TraceKind::power, const ScanOptions& opts = {});

// ---------------------------------------------------------------------------
// Depth probe

enum class SubsetScheme {
  dyadic_subset,  // first D points of a seeded permutation of E_N (nested in D)
  uniform,
  random,
  clustered  // curve schemes on [2^-N, 1]
};

const char* to_string(SubsetScheme s);
SubsetScheme subset_scheme_from_string(std::string_view name);

struct DepthProbeConfig {
  int N = 8;
  int D = 4;
  sobolev::GridConfig grid{};
  SubsetScheme scheme = SubsetScheme::dyadic_subset;
  std::uint64_t seed = 0;
  int samples = 1;
  std::vector<double> angles;  // empty: default witness directions
  ScanOptions options{};
};

struct WitnessSample {
  std::vector<core::Point2> points;
  double h = 0.0;
  double best_angle = 0.0;
  double max_snap_distance = 0.0;
  int iterations = 0;
  std::string error;
};

struct DepthProbeReport {
  double p = 0.0;
  DepthProbeConfig config;
  double rho = 0.0;
  double h_D = 0.0;
  double lambda = 0.0;  // rho / (1 + h_D)
  sobolev::SolveReport rigidity_report;
  std::vector<WitnessSample> witnesses;
  bool all_ok() const;
};

/// D-point subsets drawn by the probe's scheme, one per sample.
std::vector<core::PlanarSet> probe_subsets(const core::Exponents& e, const DepthProbeConfig& cfg);

/// rho_N = rigidity_constant(E_N), h_D = max over sampled D-subsets of
/// witness_norm, both on the same grid; lambda = rho_N / (1 + h_D).
/// A failing witness sample is recorded in-band and excluded from h_D; a
/// failing rigidity solve propagates.
DepthProbeReport depth_probe(const core::Exponents& e, const DepthProbeConfig& cfg);

}  // namespace sobext::experiments
