#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sobext/errors.hpp"
#include "sobext/sobolev.hpp"

namespace sobext::sobolev {

Grid build_grid(const Box& box, int n) {
  if (n < 5) throw DomainError("build_grid: need n >= 5 (got " + std::to_string(n) + ")");
  const double w = box.x_max - box.x_min;
  const double hgt = box.y_max - box.y_min;
  if (!(w > 0.0) || !(hgt > 0.0) || !std::isfinite(w) || !std::isfinite(hgt)) {
    throw DomainError("build_grid: degenerate box");
  }
  if (std::abs(w - hgt) > 1e-12 * std::max(w, hgt)) {
    throw DomainError("build_grid: box must be square");
  }
  return Grid(box, n, w / (n - 1));
}

bool Grid::contains(core::Point2 q) const noexcept {
  const double slack = 1e-12 * (box_.x_max - box_.x_min);
  return q.x >= box_.x_min - slack && q.x <= box_.x_max + slack && q.y >= box_.y_min - slack &&
         q.y <= box_.y_max + slack;
}

std::pair<std::pair<int, int>, double> Grid::nearest_node(core::Point2 q) const {
  if (!contains(q)) throw DomainError("nearest_node: point outside the grid box");
  const int i = std::clamp(static_cast<int>(std::lround((q.x - box_.x_min) / h_)), 0, n_ - 1);
  const int j = std::clamp(static_cast<int>(std::lround((q.y - box_.y_min) / h_)), 0, n_ - 1);
  const auto nd = node(i, j);
  return {{i, j}, std::hypot(q.x - nd.x, q.y - nd.y)};
}

namespace {

void check_node(const Grid& g, int i, int j) {
  if (i < 0 || j < 0 || i >= g.n() || j >= g.n()) {
    throw DomainError("node (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") outside the grid");
  }
}

LinearConstraint merged(const std::map<std::size_t, double>& acc, double value) {
  LinearConstraint c;
  c.value = value;
  for (const auto& [id, w] : acc) {
    if (w != 0.0) c.terms.emplace_back(id, w);
  }
  return c;
}

// Cell containing q and the local coordinates in [0, 1].
struct CellCoords {
  int i0, j0;
  double a, b;
};

CellCoords locate(const Grid& g, core::Point2 q) {
  if (!g.contains(q)) throw DomainError("located constraint outside the grid box");
  const double fx = (q.x - g.box().x_min) / g.h();
  const double fy = (q.y - g.box().y_min) / g.h();
  const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, g.n() - 2);
  const int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, g.n() - 2);
  auto clean = [](double t) {
    if (std::abs(t) < 1e-13) return 0.0;
    if (std::abs(t - 1.0) < 1e-13) return 1.0;
    return t;
  };
  return {i0, j0, clean(fx - i0), clean(fy - j0)};
}

}  // namespace

LinearConstraint node_value_functional(const Grid& grid, int i, int j, double value) {
  check_node(grid, i, j);
  return {{{grid.id(i, j), 1.0}}, value};
}

LinearConstraint node_derivative_functional(const Grid& grid, int i, int j, int axis,
                                            double value) {
  check_node(grid, i, j);
  if (axis != 0 && axis != 1) throw DomainError("derivative axis must be 0 or 1");
  const int n = grid.n();
  const double inv = 1.0 / (2.0 * grid.h());
  const int k = axis == 0 ? i : j;
  auto at = [&](int kk) { return axis == 0 ? grid.id(kk, j) : grid.id(i, kk); };
  std::map<std::size_t, double> acc;
  if (k > 0 && k < n - 1) {
    acc[at(k + 1)] += inv;
    acc[at(k - 1)] -= inv;
  } else if (k == 0) {
    acc[at(0)] -= 3.0 * inv;
    acc[at(1)] += 4.0 * inv;
    acc[at(2)] -= inv;
  } else {
    acc[at(n - 1)] += 3.0 * inv;
    acc[at(n - 2)] -= 4.0 * inv;
    acc[at(n - 3)] += inv;
  }
  return merged(acc, value);
}

LinearConstraint point_value_functional(const Grid& grid, core::Point2 q, double value) {
  const auto c = locate(grid, q);
  std::map<std::size_t, double> acc;
  acc[grid.id(c.i0, c.j0)] += (1.0 - c.a) * (1.0 - c.b);
  acc[grid.id(c.i0 + 1, c.j0)] += c.a * (1.0 - c.b);
  acc[grid.id(c.i0, c.j0 + 1)] += (1.0 - c.a) * c.b;
  acc[grid.id(c.i0 + 1, c.j0 + 1)] += c.a * c.b;
  return merged(acc, value);
}

LinearConstraint point_derivative_functional(const Grid& grid, core::Point2 q,
                                             core::Point2 direction, double value) {
  const double len = std::hypot(direction.x, direction.y);
  if (!(len > 0.0)) throw DomainError("point_derivative_functional: zero direction");
  const double ux = direction.x / len;
  const double uy = direction.y / len;
  const auto c = locate(grid, q);
  std::map<std::size_t, double> acc;
  const int corners[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (const auto& corner : corners) {
    const double w = (corner[0] ? c.a : 1.0 - c.a) * (corner[1] ? c.b : 1.0 - c.b);
    if (w == 0.0) continue;
    const int i = c.i0 + corner[0];
    const int j = c.j0 + corner[1];
    for (int axis = 0; axis < 2; ++axis) {
      const double u = axis == 0 ? ux : uy;
      if (u == 0.0) continue;
      for (const auto& [id, coef] : node_derivative_functional(grid, i, j, axis, 0.0).terms) {
        acc[id] += w * u * coef;
      }
    }
  }
  return merged(acc, value);
}

}  // namespace sobext::sobolev
