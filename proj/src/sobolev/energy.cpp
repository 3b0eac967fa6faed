#include <cmath>

#include "sobext/errors.hpp"
#include "sobext/numeric.hpp"
#include "sobext/sobolev.hpp"

namespace sobext::sobolev {

namespace {

// Second differences at interior node (i, j).
struct Hess {
  double xx, xy, yy;
};

inline Hess second_differences(const double* F, int n, int i, int j, double inv_h2) {
  const std::size_t c = static_cast<std::size_t>(j) * n + i;
  const std::size_t N = static_cast<std::size_t>(n);
  return {(F[c + 1] - 2.0 * F[c] + F[c - 1]) * inv_h2,
          0.25 * (F[c + N + 1] - F[c - N + 1] - F[c + N - 1] + F[c - N - 1]) * inv_h2,
          (F[c + N] - 2.0 * F[c] + F[c - N]) * inv_h2};
}

}  // namespace

double hessian_energy_value(const Grid& grid, std::span<const double> values, double p,
                            double eps) {
  const int n = grid.n();
  if (values.size() != grid.node_count()) throw DomainError("field size does not match grid");
  const double h2 = grid.h() * grid.h();
  const double inv_h2 = 1.0 / h2;
  const double e2 = eps * eps;
  const double half_p = 0.5 * p;
  CompensatedSum total;
  for (int j = 1; j < n - 1; ++j) {
    double row = 0.0;
    for (int i = 1; i < n - 1; ++i) {
      const Hess d = second_differences(values.data(), n, i, j, inv_h2);
      const double t = d.xx * d.xx + 2.0 * d.xy * d.xy + d.yy * d.yy + e2;
      row += t == 0.0 ? 0.0 : std::pow(t, half_p);
    }
    total += row * h2;
  }
  return total.value();
}

EnergyGradient hessian_energy(const Grid& grid, const GridField& field, const core::Exponents& e,
                              double eps) {
  if (eps < 0.0) throw DomainError("hessian_energy: eps must be >= 0");
  const int n = grid.n();
  if (field.n != n || field.values.size() != grid.node_count()) {
    throw DomainError("hessian_energy: field does not match grid");
  }
  const double p = e.p();
  const double h2 = grid.h() * grid.h();
  const double inv_h2 = 1.0 / h2;
  const double e2 = eps * eps;
  const double half_p = 0.5 * p;
  const double* F = field.values.data();
  const std::size_t N = static_cast<std::size_t>(n);

  EnergyGradient out;
  out.gradient.assign(grid.node_count(), 0.0);
  double* g = out.gradient.data();
  CompensatedSum total;
  for (int j = 1; j < n - 1; ++j) {
    double row = 0.0;
    for (int i = 1; i < n - 1; ++i) {
      const Hess d = second_differences(F, n, i, j, inv_h2);
      const double t = d.xx * d.xx + 2.0 * d.xy * d.xy + d.yy * d.yy + e2;
      if (t == 0.0) continue;
      const double pw = std::pow(t, half_p);
      row += pw;
      // d/dF of t^(p/2) h^2 = p t^(p/2-1) (W b) . dB h^2, W = diag(1, 2, 1)
      const double s = p * pw / t * h2 * inv_h2;
      const double gxx = s * d.xx;
      const double gxy = s * 2.0 * d.xy * 0.25;
      const double gyy = s * d.yy;
      const std::size_t c = static_cast<std::size_t>(j) * N + i;
      g[c] += -2.0 * gxx - 2.0 * gyy;
      g[c + 1] += gxx;
      g[c - 1] += gxx;
      g[c + N] += gyy;
      g[c - N] += gyy;
      g[c + N + 1] += gxy;
      g[c - N - 1] += gxy;
      g[c - N + 1] -= gxy;
      g[c + N - 1] -= gxy;
    }
    total += row * h2;
  }
  out.value = total.value();
  return out;
}

double holder_ratio(const Grid& grid, const GridField& field, const core::Exponents& e,
                    int stride) {
  if (stride < 1) throw DomainError("holder_ratio: stride must be >= 1");
  const int n = grid.n();
  const double inv = 1.0 / (2.0 * grid.h());
  struct Sample {
    double x, y, gx, gy;
  };
  std::vector<Sample> samples;
  for (int j = 1; j < n - 1; j += stride) {
    for (int i = 1; i < n - 1; i += stride) {
      const auto q = grid.node(i, j);
      samples.push_back({q.x, q.y, (field.at(i + 1, j) - field.at(i - 1, j)) * inv,
                         (field.at(i, j + 1) - field.at(i, j - 1)) * inv});
    }
  }
  const double alpha = e.alpha();
  double best = 0.0;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      const double dist = std::hypot(samples[a].x - samples[b].x, samples[a].y - samples[b].y);
      const double dg =
          std::hypot(samples[a].gx - samples[b].gx, samples[a].gy - samples[b].gy);
      best = std::max(best, dg / std::pow(dist, alpha));
    }
  }
  return best;
}

}  // namespace sobext::sobolev
