#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sobext::core {

/// The exponent pair (p, alpha) with alpha = 1 - 2/p. Only constructible with p > 2.
class Exponents {
 public:
  double p() const noexcept { return p_; }
  double alpha() const noexcept { return alpha_; }

  /// x^(1+alpha) for x >= 0, evaluated as exp((1+alpha) ln x).
  double curve_height(double x) const;

  friend Exponents make_exponents(double p);

 private:
  Exponents(double p, double alpha) : p_(p), alpha_(alpha) {}
  double p_;
  double alpha_;
};

/// Throws DomainError unless p > 2.
Exponents make_exponents(double p);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

enum class SetKind { dyadic, curve_subset, custom };

const char* to_string(SetKind kind);
SetKind set_kind_from_string(const std::string_view name);

struct PlanarSet {
  SetKind kind = SetKind::custom;
  std::optional<double> p;
  std::vector<Point2> points;
};

/// Points (s, s^(1+alpha)) on the curve gamma, parameters strictly increasing in [0, 1].
class CurveSet {
 public:
  const Exponents& exponents() const noexcept { return exps_; }
  std::span<const double> params() const noexcept { return params_; }
  std::span<const Point2> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return params_.size(); }

  PlanarSet to_planar() const;

  friend CurveSet curve_subset(const Exponents& e, std::span<const double> params);

 private:
  CurveSet(Exponents e, std::vector<double> params, std::vector<Point2> points)
      : exps_(e), params_(std::move(params)), points_(std::move(points)) {}
  Exponents exps_;
  std::vector<double> params_;
  std::vector<Point2> points_;
};

/// E_N = {(2^-k, (2^-k)^(1+alpha)) : k = 2..N} u {(0,0)}, descending in x. Requires N >= 2.
PlanarSet generate_dyadic_set(const Exponents& e, int N);

/// Sorted, validated curve subset. Parameters must be distinct and lie in [0, 1].
CurveSet curve_subset(const Exponents& e, std::span<const double> params);

/// Number of nonzero points of E_N strictly inside the ball B(0, delta/2), delta = N^(-1/alpha).
int inner_ball_count(const Exponents& e, int N);

}  // namespace sobext::core
