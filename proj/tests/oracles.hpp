#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here shares code with the library's closed forms or quadrature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sobext/besov.hpp"

namespace oracle {

/// Adaptive Gauss-Kronrod on finite intervals, exp-sinh on half-lines.
inline double gk(auto f, double a, double b, double tol = 1e-13) {
  const double inf = std::numeric_limits<double>::infinity();
  if (std::isinf(a) && std::isinf(b)) return gk(f, a, 0.0, tol) + gk(f, 0.0, b, tol);
  if (std::isinf(a) || std::isinf(b)) {
    boost::math::quadrature::exp_sinh<double> es;
    if (std::isinf(b)) return es.integrate([&](double x) { return f(a + x); }, 0.0, inf, tol);
    return es.integrate([&](double x) { return f(b - x); }, 0.0, inf, tol);
  }
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol, &err);
}

/// int_a^b int_c^d |s - t|^-p dt ds by nested adaptive Gauss-Kronrod (b < c).
inline double rectangle(double a, double b, double c, double d, double p) {
  return gk([&](double s) { return gk([&](double t) { return std::pow(t - s, -p); }, c, d); }, a, b, 1e-12);
}

/// Index of a nearest neighbour by exhaustive scan, ties to the lower index.
inline std::size_t nearest(const std::vector<double>& s, std::size_t k) {
  std::size_t best = k;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j == k) continue;
    const double d = std::fabs(s[j] - s[k]);
    if (d < dist) {
      dist = d;
      best = j;
    }
  }
  return best;
}

/// Q from the defining sums, with weights from quadrature. Sites ascending.
inline double energy(const std::vector<double>& s, const std::vector<double>& phi, double p) {
  const std::size_t K = s.size();
  if (K < 2) return 0.0;
  std::vector<double> m(K);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t n = nearest(s, k);
    m[k] = (phi[k] - phi[n]) / (s[k] - s[n]);
  }
  double q = 0.0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double d = s[k + 1] - s[k];
    const double M = std::fabs(m[k] - m[k + 1]) / d + std::fabs(phi[k] + m[k] * d - phi[k + 1]) / (d * d);
    q += std::pow(M, p) * d * d;
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t l = k + 1; l < K; ++l) {
      const double a = k == 0 ? -inf : s[k - 1];
      const double d = l + 1 == K ? inf : s[l + 1];
      q += std::pow(std::fabs(m[k] - m[l]), p) * rectangle(a, s[k], s[l], d, p);
    }
  return q;
}

/// Hermite basis evaluation of the C^1 interpolant on [s0, s1].
inline double hermite(double s0, double s1, double f0, double f1, double d0, double d1, double s) {
  const double h = s1 - s0, t = (s - s0) / h;
  const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
  const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
  return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
}

/// int int |f'(s) - f'(t)|^p / |s - t|^p over the plane by nested quadrature,
/// split at the breakpoints and on the diagonal. `deriv` must be C^0.
inline double seminorm(auto deriv, std::vector<double> breaks, double p, double tol = 1e-11) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cuts{-inf};
  cuts.insert(cuts.end(), breaks.begin(), breaks.end());
  cuts.push_back(inf);
  auto integrand = [&](double s, double t) {
    if (s == t) return 0.0;
    return std::pow(std::fabs(deriv(s) - deriv(t)) / std::fabs(s - t), p);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += gk(
        [&](double s) {
          double inner = 0.0;
          for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const double lo = cuts[j], hi = cuts[j + 1];
            if (i == j) {
              if (std::isfinite(lo)) inner += gk([&](double t) { return integrand(s, t); }, lo, s, tol);
              else inner += 0.0;  // constant derivative on a tail
              if (std::isfinite(hi)) inner += gk([&](double t) { return integrand(s, t); }, s, hi, tol);
            } else {
              inner += gk([&](double t) { return integrand(s, t); }, lo, hi, tol);
            }
          }
          return inner;
        },
        cuts[i], cuts[i + 1], tol);
  }
  return total;
}

}  // namespace oracle
