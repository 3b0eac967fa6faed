#pragma once

// Discrete Besov trace energy on a finite subset of the line, together with a
// C^1 piecewise-cubic extension whose continuous seminorm can be integrated.
//
// Indices are zero-based throughout: sites s[0] < ... < s[K-1], with the
// sentinels s[-1] = -inf and s[K] = +inf implied.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sobext/core.hpp"

namespace sobext::besov {

class SiteSet {
 public:
  std::span<const double> sites() const noexcept { return sites_; }
  std::size_t size() const noexcept { return sites_.size(); }
  double operator[](std::size_t i) const { return sites_[i]; }

  friend SiteSet make_sites(std::span<const double> values);

 private:
  explicit SiteSet(std::vector<double> s) : sites_(std::move(s)) {}
  std::vector<double> sites_;
};

/// Sorts ascending. Throws DomainError on empty input, duplicates or non-finite values.
SiteSet make_sites(std::span<const double> values);

/// Values phi(s_k) aligned with a SiteSet.
struct TraceData {
  std::vector<double> values;
};

struct SlopeData {
  std::vector<std::size_t> neighbor;  // n(k): index of a nearest neighbour of s_k
  std::vector<double> slopes;         // m_k, size K
  std::vector<double> gaps;           // Delta_k = s_{k+1} - s_k, size K-1
  std::vector<double> second_order;   // M_k, size K-1
};

struct EnergyReport {
  double p = 0.0;
  std::size_t K = 0;
  double Q = 0.0;
  double second_order_part = 0.0;  // sum_k M_k^p Delta_k^2
  double pair_part = 0.0;          // sum_{k<l} |m_k - m_l|^p A_kl
};

/// Nearest-neighbour slopes and second-order terms. Equidistant neighbours
/// resolve to the left one. K = 1 yields empty data.
SlopeData slope_data(const SiteSet& sites, const TraceData& trace);

/// A_kl = int_{s_{k-1}}^{s_k} int_{s_l}^{s_{l+1}} |s - t|^-p ds dt for 0 <= k < l < K,
/// evaluated in closed form. Rearranged so that no two terms of opposite sign
/// are subtracted; every factor is an expm1/log1p evaluation.
double interaction_weight(const SiteSet& sites, std::size_t k, std::size_t l,
                          const core::Exponents& e);

/// Same closed form on an explicit rectangle [a, b] x [c, d] with b < c; a may
/// be -inf and d may be +inf.
double rectangle_weight(double a, double b, double c, double d, double p);

EnergyReport besov_energy(const SiteSet& sites, const TraceData& trace,
                          const core::Exponents& e);

/// C^1 function made of cubic pieces on [s_k, s_{k+1}] and affine tails outside [s_0, s_{K-1}].
class PiecewiseCurve {
 public:
  struct Tail {
    double slope = 0.0;
    double intercept = 0.0;  // value = intercept + slope * s
  };

  /// Cubic coefficients per interval in the local variable u = s - s_k:
  /// c0 + c1 u + c2 u^2 + c3 u^3.
  using Cubic = std::array<double, 4>;

  PiecewiseCurve(std::vector<double> breakpoints, std::vector<Cubic> pieces, Tail left,
                 Tail right);
  /// As above, pinning the value at the last breakpoint (otherwise taken from the right tail).
  PiecewiseCurve(std::vector<double> breakpoints, std::vector<Cubic> pieces, Tail left,
                 Tail right, double last_value);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const Cubic> pieces() const noexcept { return pieces_; }
  const Tail& left_tail() const noexcept { return left_; }
  const Tail& right_tail() const noexcept { return right_; }

  double value(double s) const;
  double derivative(double s) const;

  /// Largest jump in value and in first derivative across the breakpoints.
  double max_value_jump() const;
  double max_derivative_jump() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Cubic> pieces_;
  Tail left_;
  Tail right_;
  double last_value_;
};

/// Cubic Hermite interpolant with values phi(s_k) and derivatives m_k,
/// continued affinely past both ends. K = 1 gives the constant phi(s_0).
PiecewiseCurve hermite_extend(const SiteSet& sites, const TraceData& trace,
                              const SlopeData& slopes);

struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-300;
  std::size_t max_regions = 400000;
  /// Relative tolerance for accepting a breakpoint as C^1.
  double continuity_tol = 1e-9;
};

struct BesovIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
  bool infinite = false;
  std::size_t regions = 0;
};

/// int_R int_R |phi'(s) - phi'(t)|^p / |s - t|^p ds dt for a piecewise-cubic
/// curve. Tail contributions are integrated analytically in the tail variable.
/// A derivative jump at a breakpoint makes the integral diverge; this is
/// reported through `infinite` rather than thrown. Throws NumericalError when
/// the region budget runs out before the tolerance is met.
BesovIntegral continuous_besov(const PiecewiseCurve& curve, const core::Exponents& e,
                               const QuadratureConfig& cfg = {});

}  // namespace sobext::besov
