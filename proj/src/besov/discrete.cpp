#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sobext/besov.hpp"
#include "sobext/errors.hpp"
#include "sobext/numeric.hpp"

namespace sobext::besov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_aligned(const SiteSet& sites, const TraceData& trace) {
  if (trace.values.size() != sites.size()) {
    throw DomainError("trace has " + std::to_string(trace.values.size()) +
                      " values for " + std::to_string(sites.size()) + " sites");
  }
}

// (1 + x)^q - 1
double pow1pm1(double x, double q) { return std::expm1(q * std::log1p(x)); }

}  // namespace

SiteSet make_sites(std::span<const double> values) {
  if (values.empty()) throw DomainError("make_sites: empty site list");
  std::vector<double> s(values.begin(), values.end());
  for (double v : s) {
    if (!std::isfinite(v)) throw DomainError("make_sites: non-finite site");
  }
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw DomainError("make_sites: duplicate site");
  }
  return SiteSet(std::move(s));
}

SlopeData slope_data(const SiteSet& sites, const TraceData& trace) {
  check_aligned(sites, trace);
  const std::size_t K = sites.size();
  SlopeData out;
  if (K == 1) return out;

  const auto& s = sites;
  const auto& phi = trace.values;
  out.neighbor.resize(K);
  out.slopes.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t n;
    if (k == 0) {
      n = 1;
    } else if (k + 1 == K) {
      n = K - 2;
    } else {
      n = (s[k] - s[k - 1] <= s[k + 1] - s[k]) ? k - 1 : k + 1;
    }
    out.neighbor[k] = n;
    out.slopes[k] = (phi[k] - phi[n]) / (s[k] - s[n]);
  }

  out.gaps.resize(K - 1);
  out.second_order.resize(K - 1);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double gap = s[k + 1] - s[k];
    const double m = out.slopes[k];
    out.gaps[k] = gap;
    out.second_order[k] = std::abs(m - out.slopes[k + 1]) / gap +
                          std::abs(phi[k] + m * gap - phi[k + 1]) / (gap * gap);
  }
  return out;
}

double rectangle_weight(double a, double b, double c, double d, double p) {
  if (!(a < b) || !(b < c) || !(c < d)) {
    throw DomainError("rectangle_weight: need a < b < c < d");
  }
  // With g = c - b, u = (b - a)/g, v = (d - c)/g and E(x) = (1+x)^q - 1, q = 2 - p,
  //   (p-1)(p-2) A / g^q = (1+u)^q E(-uv/((1+u)(1+v))) + E(v) E(u/(1+v)),
  // and both summands are positive for q < 0.
  const double q = 2.0 - p;
  const double g = c - b;
  const double scale = std::exp(q * std::log(g)) / ((p - 1.0) * (p - 2.0));
  const bool left_inf = std::isinf(a);
  const bool right_inf = std::isinf(d);
  if (left_inf && right_inf) return scale;
  if (left_inf) return -scale * pow1pm1((d - c) / g, q);
  if (right_inf) return -scale * pow1pm1((b - a) / g, q);

  const double u = (b - a) / g;
  const double v = (d - c) / g;
  // log(1 + x) for x = -uv/((1+u)(1+v)). Near x = -1 (nearly touching
  // rectangles) 1 + x = (1+u+v)/((1+u)(1+v)) must not be formed by subtraction.
  const double x = -(u / (1.0 + u)) * (v / (1.0 + v));
  const double log1px =
      x > -0.5 ? std::log1p(x) : std::log1p(u + v) - std::log1p(u) - std::log1p(v);
  const double first = std::exp(q * std::log1p(u)) * std::expm1(q * log1px);
  const double second = pow1pm1(v, q) * pow1pm1(u / (1.0 + v), q);
  return scale * (first + second);
}

double interaction_weight(const SiteSet& sites, std::size_t k, std::size_t l,
                          const core::Exponents& e) {
  const std::size_t K = sites.size();
  if (!(k < l) || l >= K) {
    throw DomainError("interaction_weight: need 0 <= k < l < K (k = " + std::to_string(k) +
                      ", l = " + std::to_string(l) + ", K = " + std::to_string(K) + ")");
  }
  const double a = k == 0 ? -kInf : sites[k - 1];
  const double d = l + 1 == K ? kInf : sites[l + 1];
  return rectangle_weight(a, sites[k], sites[l], d, e.p());
}

EnergyReport besov_energy(const SiteSet& sites, const TraceData& trace,
                          const core::Exponents& e) {
  check_aligned(sites, trace);
  const std::size_t K = sites.size();
  EnergyReport report{e.p(), K, 0.0, 0.0, 0.0};
  if (K == 1) return report;

  const double p = e.p();
  const SlopeData sd = slope_data(sites, trace);

  CompensatedSum second;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    second += std::pow(sd.second_order[k], p) * sd.gaps[k] * sd.gaps[k];
  }
  CompensatedSum pair;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    for (std::size_t l = k + 1; l < K; ++l) {
      const double dm = std::abs(sd.slopes[k] - sd.slopes[l]);
      if (dm == 0.0) continue;
      pair += std::pow(dm, p) * interaction_weight(sites, k, l, e);
    }
  }
  report.second_order_part = second.value();
  report.pair_part = pair.value();
  report.Q = report.second_order_part + report.pair_part;
  return report;
}

}  // namespace sobext::besov
