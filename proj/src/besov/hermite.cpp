#include <algorithm>
#include <cmath>

#include "sobext/besov.hpp"
#include "sobext/errors.hpp"

namespace sobext::besov {

PiecewiseCurve::PiecewiseCurve(std::vector<double> breakpoints, std::vector<Cubic> pieces,
                               Tail left, Tail right)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), left_(left),
      right_(right), last_value_(0.0) {
  if (breakpoints_.empty()) throw DomainError("PiecewiseCurve: no breakpoints");
  if (pieces_.size() + 1 != breakpoints_.size()) {
    throw DomainError("PiecewiseCurve: need one cubic per interval");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw DomainError("PiecewiseCurve: breakpoints must be strictly increasing");
    }
  }
  last_value_ = right_.intercept + right_.slope * breakpoints_.back();
}

PiecewiseCurve::PiecewiseCurve(std::vector<double> breakpoints, std::vector<Cubic> pieces,
                               Tail left, Tail right, double last_value)
    : PiecewiseCurve(std::move(breakpoints), std::move(pieces), left, right) {
  last_value_ = last_value;
}

namespace {

double cubic_value(const PiecewiseCurve::Cubic& c, double u) {
  return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
}

double cubic_slope(const PiecewiseCurve::Cubic& c, double u) {
  return c[1] + u * (2.0 * c[2] + u * 3.0 * c[3]);
}

}  // namespace

double PiecewiseCurve::value(double s) const {
  const double first = breakpoints_.front();
  const double last = breakpoints_.back();
  if (s < first) return left_.intercept + left_.slope * s;
  if (s > last) return right_.intercept + right_.slope * s;
  if (s == last) return last_value_;
  // Interior sites hit c0 of their piece exactly.
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return cubic_value(pieces_[k], s - breakpoints_[k]);
}

double PiecewiseCurve::derivative(double s) const {
  const double first = breakpoints_.front();
  const double last = breakpoints_.back();
  if (s < first) return left_.slope;
  if (s > last) return right_.slope;
  if (pieces_.empty()) return left_.slope;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  if (k == pieces_.size()) k = pieces_.size() - 1;
  return cubic_slope(pieces_[k], s - breakpoints_[k]);
}

double PiecewiseCurve::max_value_jump() const {
  const double first = breakpoints_.front();
  const double last = breakpoints_.back();
  if (pieces_.empty()) {
    return std::abs((left_.intercept + left_.slope * first) -
                    (right_.intercept + right_.slope * last));
  }
  double jump = std::abs(left_.intercept + left_.slope * first - pieces_.front()[0]);
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    const double h = breakpoints_[k + 1] - breakpoints_[k];
    jump = std::max(jump, std::abs(cubic_value(pieces_[k], h) - pieces_[k + 1][0]));
  }
  const double h = last - breakpoints_[pieces_.size() - 1];
  jump = std::max(jump, std::abs(cubic_value(pieces_.back(), h) -
                                 (right_.intercept + right_.slope * last)));
  return jump;
}

double PiecewiseCurve::max_derivative_jump() const {
  if (pieces_.empty()) return std::abs(left_.slope - right_.slope);
  double jump = std::abs(left_.slope - pieces_.front()[1]);
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    const double h = breakpoints_[k + 1] - breakpoints_[k];
    jump = std::max(jump, std::abs(cubic_slope(pieces_[k], h) - pieces_[k + 1][1]));
  }
  const double h = breakpoints_.back() - breakpoints_[pieces_.size() - 1];
  jump = std::max(jump, std::abs(cubic_slope(pieces_.back(), h) - right_.slope));
  return jump;
}

PiecewiseCurve hermite_extend(const SiteSet& sites, const TraceData& trace,
                              const SlopeData& slopes) {
  const std::size_t K = sites.size();
  if (trace.values.size() != K) throw DomainError("hermite_extend: misaligned trace");
  const auto& phi = trace.values;
  std::vector<double> bp(sites.sites().begin(), sites.sites().end());
  if (K == 1) {
    const PiecewiseCurve::Tail flat{0.0, phi[0]};
    return PiecewiseCurve(std::move(bp), {}, flat, flat, phi[0]);
  }
  if (slopes.slopes.size() != K) throw DomainError("hermite_extend: misaligned slopes");
  const auto& m = slopes.slopes;

  std::vector<PiecewiseCurve::Cubic> pieces(K - 1);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double h = bp[k + 1] - bp[k];
    const double secant = (phi[k + 1] - phi[k]) / h;
    pieces[k] = {phi[k], m[k], (3.0 * secant - 2.0 * m[k] - m[k + 1]) / h,
                 (m[k] + m[k + 1] - 2.0 * secant) / (h * h)};
  }
  const PiecewiseCurve::Tail left{m.front(), phi.front() - m.front() * bp.front()};
  const PiecewiseCurve::Tail right{m.back(), phi.back() - m.back() * bp.back()};
  return PiecewiseCurve(std::move(bp), std::move(pieces), left, right, phi.back());
}

}  // namespace sobext::besov
