#include <algorithm>
#include <cmath>
#include <string>

#include "sobext/core.hpp"
#include "sobext/errors.hpp"

namespace sobext::core {

const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::dyadic:
      return "dyadic";
    case SetKind::curve_subset:
      return "curve-subset";
    case SetKind::custom:
      return "custom";
  }
  return "custom";
}

SetKind set_kind_from_string(std::string_view name) {
  if (name == "dyadic") return SetKind::dyadic;
  if (name == "curve-subset") return SetKind::curve_subset;
  if (name == "custom") return SetKind::custom;
  throw DomainError("unknown set kind '" + std::string(name) + "'");
}

PlanarSet generate_dyadic_set(const Exponents& e, int N) {
  if (N < 2) throw DomainError("generate_dyadic_set: N must be >= 2");
  PlanarSet set{SetKind::dyadic, e.p(), {}};
  set.points.reserve(static_cast<std::size_t>(N));
  for (int k = 2; k <= N; ++k) {
    const double x = std::ldexp(1.0, -k);
    set.points.push_back({x, e.curve_height(x)});
  }
  set.points.push_back({0.0, 0.0});
  return set;
}

CurveSet curve_subset(const Exponents& e, std::span<const double> params) {
  std::vector<double> sorted(params.begin(), params.end());
  for (double s : sorted) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DomainError("curve_subset: parameter " + std::to_string(s) + " outside [0, 1]");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("curve_subset: duplicate parameter");
  }
  std::vector<Point2> points;
  points.reserve(sorted.size());
  for (double s : sorted) points.push_back({s, e.curve_height(s)});
  return CurveSet(e, std::move(sorted), std::move(points));
}

PlanarSet CurveSet::to_planar() const {
  return PlanarSet{SetKind::curve_subset, exps_.p(), points_};
}

int inner_ball_count(const Exponents& e, int N) {
  if (N < 2) throw DomainError("inner_ball_count: N must be >= 2");
  // Open ball: strict inequality.
  const double radius = 0.5 * std::pow(static_cast<double>(N), -1.0 / e.alpha());
  int count = 0;
  for (int k = 2; k <= N; ++k) {
    const double x = std::ldexp(1.0, -k);
    if (std::hypot(x, e.curve_height(x)) < radius) ++count;
  }
  return count;
}

}  // namespace sobext::core
