#include <Eigen/CholmodSupport>
#include <Eigen/SparseCore>
#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "sobext/errors.hpp"
#include "sobext/numeric.hpp"
#include "sobext/sobolev.hpp"

namespace sobext::sobolev {

std::vector<double> SolverConfig::default_schedule() {
  std::vector<double> s;
  for (double eps = 1e-1; eps > 1e-6; eps *= 0.25) s.push_back(eps);
  s.push_back(1e-6);
  return s;
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// x = x0 + Z y. Pivot variables are expressed through free ones:
//   x[pivot] = rhs - sum_j coef_j x[j].
struct Elimination {
  struct PivotRow {
    std::size_t var;
    double rhs;
    std::vector<std::pair<std::size_t, double>> deps;
  };
  std::vector<PivotRow> rows;
  std::vector<std::ptrdiff_t> reduced;  // var -> reduced index, -1 for pivots
  std::vector<std::size_t> free_vars;   // reduced index -> var
  std::vector<std::ptrdiff_t> row_of;   // var -> pivot row, -1 for free
  std::size_t dropped = 0;

  std::vector<double> expand(const Eigen::VectorXd& y) const {
    std::vector<double> x(reduced.size(), 0.0);
    for (std::size_t r = 0; r < free_vars.size(); ++r) x[free_vars[r]] = y[static_cast<Eigen::Index>(r)];
    for (const auto& row : rows) {
      double v = row.rhs;
      for (const auto& [j, c] : row.deps) v -= c * x[j];
      x[row.var] = v;
    }
    return x;
  }

  Eigen::VectorXd reduce_gradient(const std::vector<double>& g) const {
    Eigen::VectorXd gr(static_cast<Eigen::Index>(free_vars.size()));
    for (std::size_t r = 0; r < free_vars.size(); ++r) gr[static_cast<Eigen::Index>(r)] = g[free_vars[r]];
    for (const auto& row : rows) {
      const double gp = g[row.var];
      if (gp == 0.0) continue;
      for (const auto& [j, c] : row.deps) gr[reduced[j]] -= c * gp;
    }
    return gr;
  }
};

Elimination eliminate(const std::vector<LinearConstraint>& cons, std::size_t nvars,
                      const SolverConfig& cfg) {
  Elimination el;
  el.reduced.assign(nvars, -1);
  el.row_of.assign(nvars, -1);

  std::vector<std::size_t> touched;
  for (const auto& c : cons) {
    for (const auto& [id, w] : c.terms) {
      if (id >= nvars) throw DomainError("constraint refers to a node outside the grid");
      touched.push_back(id);
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  const std::size_t m = cons.size();
  const std::size_t t = touched.size();
  auto col_of = [&](std::size_t id) {
    return static_cast<std::size_t>(std::lower_bound(touched.begin(), touched.end(), id) -
                                    touched.begin());
  };

  // Dense Gauss-Jordan with complete pivoting on unit-scaled rows.
  std::vector<std::vector<double>> A(m, std::vector<double>(t, 0.0));
  std::vector<double> b(m, 0.0);
  double rhs_scale = 1.0;
  for (std::size_t r = 0; r < m; ++r) {
    double mx = 0.0;
    for (const auto& [id, w] : cons[r].terms) {
      A[r][col_of(id)] += w;
    }
    for (double v : A[r]) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) {
      if (cons[r].value != 0.0) throw ResolutionError("constraint with no terms and nonzero value");
      continue;
    }
    for (double& v : A[r]) v /= mx;
    b[r] = cons[r].value / mx;
    rhs_scale = std::max(rhs_scale, std::abs(b[r]));
  }

  std::vector<char> col_used(t, 0);
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (; rank < m; ++rank) {
    double best = 0.0;
    std::size_t br = 0, bc = 0;
    for (std::size_t r = rank; r < m; ++r) {
      for (std::size_t c = 0; c < t; ++c) {
        if (!col_used[c] && std::abs(A[r][c]) > best) {
          best = std::abs(A[r][c]);
          br = r;
          bc = c;
        }
      }
    }
    if (best <= cfg.dependency_tol) break;
    std::swap(A[rank], A[br]);
    std::swap(b[rank], b[br]);
    const double piv = A[rank][bc];
    for (double& v : A[rank]) v /= piv;
    b[rank] /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == rank || A[r][bc] == 0.0) continue;
      const double f = A[r][bc];
      for (std::size_t c = 0; c < t; ++c) A[r][c] -= f * A[rank][c];
      A[r][bc] = 0.0;
      b[r] -= f * b[rank];
    }
    col_used[bc] = 1;
    pivot_col.push_back(bc);
  }
  for (std::size_t r = rank; r < m; ++r) {
    if (std::abs(b[r]) > cfg.constraint_tol * rhs_scale) {
      std::ostringstream msg;
      msg << "constraints are inconsistent on this grid (residual " << b[r]
          << " after elimination); refine the grid or separate the points";
      throw ResolutionError(msg.str());
    }
  }
  el.dropped = m - rank;

  for (std::size_t r = 0; r < rank; ++r) {
    Elimination::PivotRow row;
    row.var = touched[pivot_col[r]];
    row.rhs = b[r];
    for (std::size_t c = 0; c < t; ++c) {
      if (!col_used[c] && A[r][c] != 0.0) row.deps.emplace_back(touched[c], A[r][c]);
    }
    el.row_of[row.var] = static_cast<std::ptrdiff_t>(r);
    el.rows.push_back(std::move(row));
  }
  for (std::size_t v = 0; v < nvars; ++v) {
    if (el.row_of[v] < 0) {
      el.reduced[v] = static_cast<std::ptrdiff_t>(el.free_vars.size());
      el.free_vars.push_back(v);
    }
  }
  return el;
}

// Reduced Hessian Z^T H Z, lower triangle, with a fixed sparsity pattern.
class ReducedHessian {
 public:
  ReducedHessian(const Grid& grid, const Elimination& el) : grid_(grid), el_(el) {
    const int n = grid.n();
    const std::size_t N = static_cast<std::size_t>(n);
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    // B: rows (xx, xy, yy), columns over the 3x3 stencil a = (dj+1)*3 + (di+1).
    std::array<std::array<double, 9>, 3> B{};
    B[0][3] = 1; B[0][4] = -2; B[0][5] = 1;
    B[1][8] = 0.25; B[1][2] = -0.25; B[1][6] = -0.25; B[1][0] = 0.25;
    B[2][1] = 1; B[2][4] = -2; B[2][7] = 1;
    for (auto& row : B) for (double& v : row) v *= inv_h2;
    B_ = B;
    const double W[3] = {1.0, 2.0, 1.0};
    for (int a = 0; a < 9; ++a)
      for (int c = 0; c < 9; ++c) {
        double s = 0.0;
        for (int r = 0; r < 3; ++r) s += B[r][a] * W[r] * B[r][c];
        M0_[a][c] = s;
      }
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        offsets_[(dj + 1) * 3 + (di + 1)] = static_cast<std::ptrdiff_t>(dj) * static_cast<std::ptrdiff_t>(N) + di;

    // Pattern pass.
    std::vector<Eigen::Triplet<double, int>> trip;
    std::vector<std::pair<int, int>> entries;
    for_each_entry([&](int r, int c, double) { entries.emplace_back(r, c); }, nullptr, 0.0, 0.0);
    trip.reserve(entries.size());
    for (const auto& [r, c] : entries) trip.emplace_back(r, c, 1.0);
    const auto nf = static_cast<int>(el.free_vars.size());
    H_.resize(nf, nf);
    H_.setFromTriplets(trip.begin(), trip.end());
    H_.makeCompressed();
    slots_.resize(entries.size());
    const int* outer = H_.outerIndexPtr();
    const int* inner = H_.innerIndexPtr();
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto [r, c] = entries[k];
      const int* lo = inner + outer[c];
      const int* hi = inner + outer[c + 1];
      slots_[k] = static_cast<int>(std::lower_bound(lo, hi, r) - inner);
    }
    diag_slots_.resize(static_cast<std::size_t>(nf));
    for (int c = 0; c < nf; ++c) {
      const int* lo = inner + outer[c];
      const int* hi = inner + outer[c + 1];
      diag_slots_[static_cast<std::size_t>(c)] = static_cast<int>(std::lower_bound(lo, hi, c) - inner);
    }
  }

  // Fills values for the field x at smoothing eps, adds shift to the diagonal.
  const SpMat& assemble(const std::vector<double>& x, double p, double eps) {
    double* val = H_.valuePtr();
    std::fill(val, val + H_.nonZeros(), 0.0);
    std::size_t k = 0;
    for_each_entry([&](int, int, double v) { val[slots_[k++]] += v; }, &x, p, eps);
    return H_;
  }

  double max_diagonal() const {
    double m = 0.0;
    for (int s : diag_slots_) m = std::max(m, H_.valuePtr()[s]);
    return m;
  }

  void shift_diagonal(double mu) {
    for (int s : diag_slots_) H_.valuePtr()[s] += mu;
  }

  const SpMat& matrix() const { return H_; }

 private:
  // Visits every (row >= col) contribution in a fixed order. Without a field
  // only the pattern is produced (values are dummies).
  template <class Visit>
  void for_each_entry(Visit&& visit, const std::vector<double>* x, double p, double eps) const {
    const int n = grid_.n();
    const std::size_t N = static_cast<std::size_t>(n);
    const double h2 = grid_.h() * grid_.h();
    const double e2 = eps * eps;
    std::array<std::vector<std::pair<int, double>>, 9> exp;
    for (int j = 1; j < n - 1; ++j) {
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t c = static_cast<std::size_t>(j) * N + static_cast<std::size_t>(i);
        double a1 = 1.0, a2 = 0.0;
        std::array<double, 9> gvec{};
        if (x) {
          std::array<double, 3> bvec{};
          for (int r = 0; r < 3; ++r) {
            double s = 0.0;
            for (int a = 0; a < 9; ++a) {
              if (B_[r][a] != 0.0) s += B_[r][a] * (*x)[c + offsets_[a]];
            }
            bvec[r] = s;
          }
          const double t = bvec[0] * bvec[0] + 2.0 * bvec[1] * bvec[1] + bvec[2] * bvec[2] + e2;
          if (t > 0.0) {
            const double tp = std::pow(t, 0.5 * p - 1.0);
            a1 = p * tp * h2;
            a2 = p * (p - 2.0) * tp / t * h2;
          } else {
            a1 = 0.0;
          }
          const double W[3] = {1.0, 2.0, 1.0};
          for (int a = 0; a < 9; ++a) {
            double s = 0.0;
            for (int r = 0; r < 3; ++r) s += B_[r][a] * W[r] * bvec[r];
            gvec[a] = s;
          }
        }
        for (int a = 0; a < 9; ++a) expansion(c + offsets_[a], exp[a]);
        for (int a = 0; a < 9; ++a) {
          for (int b = 0; b < 9; ++b) {
            const double kab = a1 * M0_[a][b] + a2 * gvec[a] * gvec[b];
            for (const auto& [ra, ca] : exp[a]) {
              for (const auto& [rb, cb] : exp[b]) {
                if (ra >= rb) visit(ra, rb, kab * ca * cb);
              }
            }
          }
        }
      }
    }
  }

  void expansion(std::size_t var, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    const auto r = el_.reduced[var];
    if (r >= 0) {
      out.emplace_back(static_cast<int>(r), 1.0);
      return;
    }
    const auto& row = el_.rows[static_cast<std::size_t>(el_.row_of[var])];
    for (const auto& [j, coef] : row.deps) out.emplace_back(static_cast<int>(el_.reduced[j]), -coef);
  }

  const Grid& grid_;
  const Elimination& el_;
  std::array<std::array<double, 9>, 3> B_{};
  std::array<std::array<double, 9>, 9> M0_{};
  std::array<std::ptrdiff_t, 9> offsets_{};
  SpMat H_;
  std::vector<int> slots_;
  std::vector<int> diag_slots_;
};

std::vector<LinearConstraint> collect_constraints(const GridProblem& pb) {
  std::set<std::pair<int, int>> seen_points;
  std::set<std::tuple<int, int, int>> seen_derivs;
  std::vector<LinearConstraint> out;
  for (const auto& c : pb.point_constraints) {
    if (!seen_points.emplace(c.i, c.j).second) {
      throw DomainError("duplicate point constraint at node (" + std::to_string(c.i) + ", " +
                        std::to_string(c.j) + ")");
    }
    out.push_back(node_value_functional(pb.grid, c.i, c.j, c.value));
  }
  for (const auto& c : pb.derivative_constraints) {
    if (!seen_derivs.emplace(c.i, c.j, c.axis).second) {
      throw DomainError("duplicate derivative constraint at node (" + std::to_string(c.i) +
                        ", " + std::to_string(c.j) + "), axis " + std::to_string(c.axis));
    }
    out.push_back(node_derivative_functional(pb.grid, c.i, c.j, c.axis, c.value));
  }
  out.insert(out.end(), pb.functional_constraints.begin(), pb.functional_constraints.end());
  return out;
}

double constraint_residual(const std::vector<LinearConstraint>& cons, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& c : cons) {
    double s = -c.value;
    for (const auto& [id, w] : c.terms) s += w * x[id];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

}  // namespace

SolveResult solve_min_extension(const GridProblem& pb, const GridField* initial) {
  const Grid& grid = pb.grid;
  const SolverConfig& cfg = pb.config;
  const double p = pb.exponents.p();
  if (cfg.epsilon_schedule.empty()) throw DomainError("empty epsilon schedule");
  for (std::size_t s = 0; s < cfg.epsilon_schedule.size(); ++s) {
    if (!(cfg.epsilon_schedule[s] >= 0.0) ||
        (s > 0 && cfg.epsilon_schedule[s] > cfg.epsilon_schedule[s - 1])) {
      throw DomainError("epsilon schedule must be non-negative and non-increasing");
    }
  }
  if (cfg.epsilon_schedule.back() == 0.0) {
    throw DomainError("epsilon schedule must end at a positive floor");
  }

  const auto cons = collect_constraints(pb);
  const std::size_t nvars = grid.node_count();
  const Elimination el = eliminate(cons, nvars, cfg);
  const auto nfree = static_cast<Eigen::Index>(el.free_vars.size());

  Eigen::VectorXd y = Eigen::VectorXd::Zero(nfree);
  if (initial) {
    if (initial->values.size() != nvars) throw DomainError("initial field does not match grid");
    for (Eigen::Index r = 0; r < nfree; ++r) y[r] = initial->values[el.free_vars[static_cast<std::size_t>(r)]];
  }

  SolveReport report;
  report.free_variables = el.free_vars.size();
  report.dropped_constraints = el.dropped;

  ReducedHessian hess(grid, el);
  Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower> llt;
  bool analyzed = false;

  GridField field{grid.n(), el.expand(y)};
  int total_iterations = 0;
  Eigen::VectorXd gr;
  double decrement2 = 0.0;

  for (double eps : cfg.epsilon_schedule) {
    StageRecord stage;
    stage.epsilon = eps;
    auto eg = hessian_energy(grid, field, pb.exponents, eps);
    double f = eg.value;
    while (true) {
      gr = el.reduce_gradient(eg.gradient);
      if (nfree == 0) {
        decrement2 = 0.0;
        break;
      }
      if (gr.norm() <= cfg.grad_tol) {
        decrement2 = 0.0;
        break;
      }
      if (total_iterations >= cfg.max_iterations) {
        std::ostringstream msg;
        msg << "solve_min_extension: iteration budget " << cfg.max_iterations
            << " exhausted at eps = " << eps;
        throw ConvergenceError(msg.str(), gr.norm(), constraint_residual(cons, field.values));
      }
      ++total_iterations;
      ++stage.iterations;

      hess.assemble(field.values, p, eps);
      const double dmax = hess.max_diagonal();
      double mu = 1e-15 * dmax;
      hess.shift_diagonal(mu);
      if (!analyzed) {
        llt.analyzePattern(hess.matrix());
        analyzed = true;
      }
      llt.factorize(hess.matrix());
      for (int attempt = 0; llt.info() != Eigen::Success && attempt < 8; ++attempt) {
        const double more = mu * 99.0 + 1e-12 * dmax;
        hess.shift_diagonal(more);
        mu += more;
        llt.factorize(hess.matrix());
      }
      if (llt.info() != Eigen::Success) {
        throw NumericalError("solve_min_extension: Hessian factorisation failed");
      }
      const Eigen::VectorXd step = -llt.solve(gr);
      decrement2 = -gr.dot(step);
      if (!(decrement2 > 2.0 * (cfg.rel_tol * std::abs(f) + 1e-300))) break;

      // Armijo backtracking.
      double t = 1.0;
      bool accepted = false;
      std::vector<double> trial;
      double f_trial = f;
      for (int ls = 0; ls < 60; ++ls) {
        trial = el.expand(y + t * step);
        f_trial = hessian_energy_value(grid, trial, p, eps);
        if (f_trial <= f - 1e-4 * t * decrement2) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;  // no further decrease representable at this precision
      y += t * step;
      field.values = std::move(trial);
      eg = hessian_energy(grid, field, pb.exponents, eps);
      f = eg.value;
    }
    stage.smoothed_value = f;
    stage.norm = std::pow(hessian_energy_value(grid, field.values, p, 0.0), 1.0 / p);
    report.stages.push_back(stage);
    report.smoothed_value = f;
    report.final_epsilon = eps;
  }

  report.iterations = total_iterations;
  report.first_order_residual = gr.size() ? gr.norm() : 0.0;
  report.newton_decrement = std::sqrt(std::max(decrement2, 0.0));
  report.constraint_residual = constraint_residual(cons, field.values);
  report.norm_estimate = std::pow(hessian_energy_value(grid, field.values, p, 0.0), 1.0 / p);
  return {std::move(field), std::move(report)};
}

}  // namespace sobext::sobolev
