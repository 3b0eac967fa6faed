#pragma once

// Grid proxy for the minimal L^{2,p} extension problem on a square box:
// minimise sum over interior nodes of (|D^2 F|^2 + eps^2)^(p/2) h^2 subject to
// linear equality constraints on the node values.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sobext/core.hpp"

namespace sobext::sobolev {

struct Box {
  double x_min = -1.0;
  double x_max = 2.0;
  double y_min = -1.0;
  double y_max = 2.0;
};

/// Uniform square grid. Node (i, j) sits at (x_min + i h, y_min + j h) and has id j * n + i.
class Grid {
 public:
  const Box& box() const noexcept { return box_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  std::size_t id(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }
  core::Point2 node(int i, int j) const noexcept {
    return {box_.x_min + i * h_, box_.y_min + j * h_};
  }
  bool contains(core::Point2 q) const noexcept;

  /// Nearest node to q and the distance to it. q must lie in the box.
  std::pair<std::pair<int, int>, double> nearest_node(core::Point2 q) const;

  friend Grid build_grid(const Box& box, int n);

 private:
  Grid(Box b, int n, double h) : box_(b), n_(n), h_(h) {}
  Box box_;
  int n_;
  double h_;
};

/// Throws DomainError for n < 5 or a non-square / degenerate box.
Grid build_grid(const Box& box, int n);

/// Node values of a scalar field, indexed by Grid::id.
struct GridField {
  int n = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
};

struct EnergyGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Discrete Hessian energy. |D^2 F|^2 = F_xx^2 + 2 F_xy^2 + F_yy^2 from central
/// differences at interior nodes. The gradient is exact for the discrete functional.
EnergyGradient hessian_energy(const Grid& grid, const GridField& field, const core::Exponents& e,
                              double eps);

/// Energy value only (cheaper; eps = 0 gives the unsmoothed p-th power of the norm).
double hessian_energy_value(const Grid& grid, std::span<const double> values, double p,
                            double eps);

/// sum_j weight_j F(node_j) = value
struct LinearConstraint {
  std::vector<std::pair<std::size_t, double>> terms;
  double value = 0.0;
};

struct PointConstraint {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct DerivativeConstraint {
  int i = 0;
  int j = 0;
  int axis = 0;  // 0 = d/dx, 1 = d/dy
  double value = 0.0;
};

LinearConstraint node_value_functional(const Grid& grid, int i, int j, double value);
/// Central difference at interior nodes, second-order one-sided difference on the boundary.
LinearConstraint node_derivative_functional(const Grid& grid, int i, int j, int axis,
                                            double value);
/// Bilinear interpolation of node values at an arbitrary point of the box.
LinearConstraint point_value_functional(const Grid& grid, core::Point2 q, double value);
/// Bilinear interpolation of the nodal central-difference directional derivative.
/// Reduces to the central stencil when q is a node.
LinearConstraint point_derivative_functional(const Grid& grid, core::Point2 q,
                                             core::Point2 direction, double value);

struct SolverConfig {
  /// Smoothing levels, decreasing. Default: 1e-1 shrinking by 4 per stage down to 1e-6.
  std::vector<double> epsilon_schedule = default_schedule();
  /// Stop a stage when half the squared Newton decrement falls below rel_tol * objective.
  double rel_tol = 1e-13;
  /// ... or when the reduced gradient norm falls below this.
  double grad_tol = 1e-14;
  /// Total Newton iterations over all stages.
  int max_iterations = 600;
  /// Accepted violation of a constraint after elimination.
  double constraint_tol = 1e-9;
  /// Pivot threshold (on unit-scaled constraint rows) below which a row counts as dependent.
  double dependency_tol = 1e-10;

  static std::vector<double> default_schedule();
};

struct StageRecord {
  double epsilon = 0.0;
  double smoothed_value = 0.0;  // minimised smoothed objective at this epsilon
  double norm = 0.0;            // unsmoothed norm of the stage minimiser
  int iterations = 0;
};

struct SolveReport {
  /// (unsmoothed energy of the returned field)^(1/p)
  double norm_estimate = 0.0;
  double smoothed_value = 0.0;
  int iterations = 0;
  double final_epsilon = 0.0;
  double first_order_residual = 0.0;  // |Z^T grad| at the final iterate
  double newton_decrement = 0.0;      // sqrt(g^T H^-1 g) at the final iterate
  double constraint_residual = 0.0;   // max |C x - c|
  std::size_t free_variables = 0;
  std::size_t dropped_constraints = 0;  // linearly dependent, consistent rows
  std::vector<StageRecord> stages;
  std::vector<double> snap_distances;  // distance from each located point to its nearest node
};

struct GridProblem {
  Grid grid;
  core::Exponents exponents;
  std::vector<PointConstraint> point_constraints;
  std::vector<DerivativeConstraint> derivative_constraints;
  /// Constraints on arbitrary linear functionals (located point values, directional derivatives).
  std::vector<LinearConstraint> functional_constraints;
  SolverConfig config;
};

struct SolveResult {
  GridField field;
  SolveReport report;
};

/// Minimises the smoothed energy along the epsilon schedule, enforcing the
/// constraints exactly by elimination and solving each stage by damped Newton
/// with a sparse Cholesky factorisation.
///
/// Throws DomainError for duplicate node constraints, ResolutionError when the
/// constraints are inconsistent, ConvergenceError when the iteration budget runs out.
/// `initial` (if given) seeds the free variables.
SolveResult solve_min_extension(const GridProblem& problem,
                                const GridField* initial = nullptr);

enum class Placement {
  bilinear,  // located constraints use bilinear interpolation
  snap       // located constraints move to the nearest node
};

struct GridConfig {
  Box box{};
  int n = 129;
  Placement placement = Placement::bilinear;
  SolverConfig solver{};
};

struct RigidityResult {
  double rho = 0.0;
  SolveReport report;
  GridField field;
};

/// rho = min ||F|| subject to F = 0 on the set and d/dy F(0) = 1.
/// The set must contain the origin and sit at least 1 inside the box.
RigidityResult rigidity_constant(const core::Exponents& e, const core::PlanarSet& set,
                                 const GridConfig& cfg);

struct DirectionValue {
  double angle = 0.0;
  double value = 0.0;
};

struct WitnessResult {
  double h = 0.0;
  double best_angle = 0.0;
  std::vector<DirectionValue> directions;
  SolveReport report;  // report of the minimising direction
};

/// Axis directions plus 16 angles (j + 1/2) pi / 16, j = 0..15.
std::vector<double> default_witness_angles();

/// h(S) = min over sampled unit directions u of min{||F|| : F = 0 on S, d_u F(0) = 1}.
WitnessResult witness_norm(const core::Exponents& e, const core::PlanarSet& S,
                           const GridConfig& cfg,
                           std::span<const double> angles = {});

/// max over node pairs of |grad F(x) - grad F(y)| / |x - y|^alpha, gradients by
/// central differences at interior nodes visited with the given stride.
double holder_ratio(const Grid& grid, const GridField& field, const core::Exponents& e,
                    int stride = 1);

}  // namespace sobext::sobolev
