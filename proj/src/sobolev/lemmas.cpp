#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "sobext/errors.hpp"
#include "sobext/sobolev.hpp"

namespace sobext::sobolev {

namespace {

void check_margin(const Box& box, std::span<const core::Point2> pts) {
  for (const auto& q : pts) {
    if (q.x < box.x_min + 1.0 || q.x > box.x_max - 1.0 || q.y < box.y_min + 1.0 ||
        q.y > box.y_max - 1.0) {
      std::ostringstream msg;
      msg << "point (" << q.x << ", " << q.y << ") is closer than 1 to the grid boundary";
      throw DomainError(msg.str());
    }
  }
}

struct Located {
  std::vector<LinearConstraint> constraints;
  std::vector<double> snap_distances;
};

// F = 0 on the points and d_u F(0) = 1.
Located vanishing_with_unit_slope(const Grid& grid, std::span<const core::Point2> pts,
                                  double angle, Placement placement) {
  Located out;
  const core::Point2 dir{std::cos(angle), std::sin(angle)};
  std::set<std::pair<int, int>> used;
  for (const auto& q : pts) {
    const auto [node, dist] = grid.nearest_node(q);
    out.snap_distances.push_back(dist);
    if (placement == Placement::snap) {
      if (!used.insert(node).second) {
        std::ostringstream msg;
        msg << "grid too coarse to separate set points: (" << q.x << ", " << q.y
            << ") snaps to an occupied node (" << node.first << ", " << node.second << ")";
        throw ResolutionError(msg.str());
      }
      out.constraints.push_back(node_value_functional(grid, node.first, node.second, 0.0));
    } else {
      out.constraints.push_back(point_value_functional(grid, q, 0.0));
    }
  }
  const core::Point2 origin{0.0, 0.0};
  if (placement == Placement::snap) {
    const auto [node, dist] = grid.nearest_node(origin);
    LinearConstraint d;
    d.value = 1.0;
    for (int axis = 0; axis < 2; ++axis) {
      const double u = axis == 0 ? dir.x : dir.y;
      if (std::abs(u) < 1e-15) continue;
      for (const auto& [id, c] :
           node_derivative_functional(grid, node.first, node.second, axis, 0.0).terms) {
        d.terms.emplace_back(id, u * c);
      }
    }
    out.constraints.push_back(std::move(d));
  } else {
    out.constraints.push_back(point_derivative_functional(grid, origin, dir, 1.0));
  }
  return out;
}

}  // namespace

RigidityResult rigidity_constant(const core::Exponents& e, const core::PlanarSet& set,
                                 const GridConfig& cfg) {
  const bool has_origin = std::any_of(set.points.begin(), set.points.end(), [](const auto& q) {
    return q.x == 0.0 && q.y == 0.0;
  });
  if (!has_origin) throw DomainError("rigidity_constant: the set must contain the origin");
  const Grid grid = build_grid(cfg.box, cfg.n);
  check_margin(cfg.box, set.points);

  auto located = vanishing_with_unit_slope(grid, set.points, std::numbers::pi / 2, cfg.placement);
  GridProblem pb{grid, e, {}, {}, std::move(located.constraints), cfg.solver};
  auto res = solve_min_extension(pb);
  res.report.snap_distances = std::move(located.snap_distances);
  return {res.report.norm_estimate, std::move(res.report), std::move(res.field)};
}

std::vector<double> default_witness_angles() {
  std::vector<double> a{0.0, std::numbers::pi / 2};
  for (int j = 0; j < 16; ++j) a.push_back((j + 0.5) * std::numbers::pi / 16.0);
  return a;
}

WitnessResult witness_norm(const core::Exponents& e, const core::PlanarSet& S,
                           const GridConfig& cfg, std::span<const double> angles) {
  if (S.points.empty()) throw DomainError("witness_norm: empty set");
  const Grid grid = build_grid(cfg.box, cfg.n);
  check_margin(cfg.box, S.points);
  const core::Point2 origin{0.0, 0.0};
  check_margin(cfg.box, std::span<const core::Point2>(&origin, 1));

  const std::vector<double> defaults = default_witness_angles();
  if (angles.empty()) angles = defaults;

  WitnessResult out;
  out.h = std::numeric_limits<double>::infinity();
  GridField previous;
  for (double angle : angles) {
    auto located = vanishing_with_unit_slope(grid, S.points, angle, cfg.placement);
    GridProblem pb{grid, e, {}, {}, std::move(located.constraints), cfg.solver};
    auto res = solve_min_extension(pb, previous.values.empty() ? nullptr : &previous);
    res.report.snap_distances = std::move(located.snap_distances);
    const double v = res.report.norm_estimate;
    out.directions.push_back({angle, v});
    if (v < out.h) {
      out.h = v;
      out.best_angle = angle;
      out.report = res.report;
    }
    previous = std::move(res.field);
  }
  return out;
}

}  // namespace sobext::sobolev
