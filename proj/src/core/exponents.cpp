#include "sobext/core.hpp"

#include <cmath>
#include <string>

#include "sobext/errors.hpp"

namespace sobext::core {

Exponents make_exponents(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) {
    throw DomainError("Sobolev embedding requires p > 2 (got p = " + std::to_string(p) + ")");
  }
  return Exponents(p, 1.0 - 2.0 / p);
}

double Exponents::curve_height(double x) const {
  if (x < 0.0) throw DomainError("curve_height: negative abscissa");
  if (x == 0.0) return 0.0;
  return std::exp((1.0 + alpha_) * std::log(x));
}

}  // namespace sobext::core
