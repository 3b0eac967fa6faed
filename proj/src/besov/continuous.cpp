#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "sobext/besov.hpp"
#include "sobext/errors.hpp"
#include "sobext/numeric.hpp"

namespace sobext::besov {

namespace {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

template <unsigned N>
Rule make_rule() {
  // Boost stores the non-negative half of the symmetric rule.
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  Rule r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(w[i]);
    } else {
      r.x.push_back(a[i]);
      r.w.push_back(w[i]);
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
    }
  }
  return r;
}

const Rule& low_rule() {
  static const Rule r = make_rule<7>();
  return r;
}
const Rule& high_rule() {
  static const Rule r = make_rule<12>();
  return r;
}

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// One integrand over a base domain; regions refer back to it by index.
struct Term {
  int dim = 1;
  double factor = 1.0;
  Fn1 f1;
  Fn2 f2;
};

struct Region {
  std::size_t term = 0;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  double value = 0.0;
  double error = 0.0;
};

double apply_rule(const Rule& r, const Term& t, const Region& g) {
  const double hx = 0.5 * (g.x1 - g.x0);
  const double cx = 0.5 * (g.x1 + g.x0);
  double sum = 0.0;
  if (t.dim == 1) {
    for (std::size_t i = 0; i < r.x.size(); ++i) sum += r.w[i] * t.f1(cx + hx * r.x[i]);
    return t.factor * hx * sum;
  }
  const double hy = 0.5 * (g.y1 - g.y0);
  const double cy = 0.5 * (g.y1 + g.y0);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double xi = cx + hx * r.x[i];
    double row = 0.0;
    for (std::size_t j = 0; j < r.x.size(); ++j) row += r.w[j] * t.f2(xi, cy + hy * r.x[j]);
    sum += r.w[i] * row;
  }
  return t.factor * hx * hy * sum;
}

void evaluate(const std::vector<Term>& terms, Region& g) {
  const Term& t = terms[g.term];
  const double hi = apply_rule(high_rule(), t, g);
  const double lo = apply_rule(low_rule(), t, g);
  g.value = hi;
  g.error = std::abs(hi - lo);
}

std::vector<Region> split(const std::vector<Term>& terms, const Region& g) {
  std::vector<Region> out;
  const double lx = g.x1 - g.x0;
  if (terms[g.term].dim == 1) {
    const double mid = g.x0 + 0.5 * lx;
    out.push_back({g.term, g.x0, mid, 0.0, 0.0});
    out.push_back({g.term, mid, g.x1, 0.0, 0.0});
    return out;
  }
  const double ly = g.y1 - g.y0;
  const bool cut_x = lx >= 0.5 * ly;
  const bool cut_y = ly >= 0.5 * lx;
  const double mx = g.x0 + 0.5 * lx;
  const double my = g.y0 + 0.5 * ly;
  if (cut_x && cut_y) {
    out.push_back({g.term, g.x0, mx, g.y0, my});
    out.push_back({g.term, mx, g.x1, g.y0, my});
    out.push_back({g.term, g.x0, mx, my, g.y1});
    out.push_back({g.term, mx, g.x1, my, g.y1});
  } else if (cut_x) {
    out.push_back({g.term, g.x0, mx, g.y0, g.y1});
    out.push_back({g.term, mx, g.x1, g.y0, g.y1});
  } else {
    out.push_back({g.term, g.x0, g.x1, g.y0, my});
    out.push_back({g.term, g.x0, g.x1, my, g.y1});
  }
  return out;
}

}  // namespace

BesovIntegral continuous_besov(const PiecewiseCurve& curve, const core::Exponents& e,
                               const QuadratureConfig& cfg) {
  const double p = e.p();
  const auto bp = curve.breakpoints();
  const auto pieces = curve.pieces();
  const double mL = curve.left_tail().slope;
  const double mR = curve.right_tail().slope;

  double slope_scale = std::max({1.0, std::abs(mL), std::abs(mR)});
  for (const auto& c : pieces) {
    slope_scale = std::max(slope_scale, std::abs(c[1]));
  }
  if (curve.max_derivative_jump() > cfg.continuity_tol * slope_scale) {
    return {std::numeric_limits<double>::infinity(), 0.0, true, 0};
  }
  if (pieces.empty()) return {};

  const double first = bp.front();
  const double last = bp.back();
  const std::size_t P = pieces.size();
  auto dphi = [pieces](std::size_t k, double u) {
    const auto& c = pieces[k];
    return c[1] + u * (2.0 * c[2] + u * 3.0 * c[3]);
  };

  std::vector<Term> terms;
  std::vector<Region> regions;
  auto add_term = [&](Term t, double x0, double x1, double y0, double y1) {
    terms.push_back(std::move(t));
    Region g{terms.size() - 1, x0, x1, y0, y1};
    evaluate(terms, g);
    regions.push_back(g);
  };

  // Diagonal squares: (phi'(s) - phi'(t)) / (s - t) = 2 c2 + 3 c3 (u + v) exactly.
  for (std::size_t k = 0; k < P; ++k) {
    const double c2 = pieces[k][2];
    const double c3 = pieces[k][3];
    const double h = bp[k + 1] - bp[k];
    Term t{2, 1.0, {}, [c2, c3, p](double u, double v) {
             return std::pow(std::abs(2.0 * c2 + 3.0 * c3 * (u + v)), p);
           }};
    add_term(std::move(t), 0.0, h, 0.0, h);
  }

  // Distinct interior pieces, both orderings.
  for (std::size_t k = 0; k < P; ++k) {
    for (std::size_t l = k + 1; l < P; ++l) {
      Term t;
      t.dim = 2;
      t.factor = 2.0;
      if (l == k + 1) {
        // Local coordinates around the shared knot c: v = s - c <= 0 <= u = t - c.
        const double hk = bp[k + 1] - bp[k];
        const double a2 = pieces[k][2], a3 = pieces[k][3];
        const double b2 = pieces[l][2], b3 = pieces[l][3];
        t.f2 = [=](double v, double u) {
          if (u - v == 0.0) return std::pow(std::abs(2.0 * a2 + 6.0 * a3 * hk), p);
          const double num = u * (2.0 * b2 + 3.0 * b3 * u) - v * (2.0 * a2 + 3.0 * a3 * (v + 2.0 * hk));
          return std::pow(std::abs(num) / (u - v), p);
        };
        add_term(std::move(t), -hk, 0.0, 0.0, bp[l + 1] - bp[l]);
      } else {
        const double sk = bp[k];
        const double sl = bp[l];
        t.f2 = [=](double s, double r) {
          return std::pow(std::abs(dphi(l, r - sl) - dphi(k, s - sk)) / (r - s), p);
        };
        add_term(std::move(t), bp[k], bp[k + 1], bp[l], bp[l + 1]);
      }
    }
  }

  // Tails: the tail variable integrates to |x - knot|^(1-p) / (p - 1).
  for (std::size_t k = 0; k < P; ++k) {
    Term left;
    left.dim = 1;
    left.factor = 2.0 / (p - 1.0);
    if (k == 0) {
      const double c2 = pieces[0][2], c3 = pieces[0][3];
      left.f1 = [=](double u) { return std::pow(std::abs(2.0 * c2 + 3.0 * c3 * u), p) * u; };
      add_term(std::move(left), 0.0, bp[1] - bp[0], 0.0, 0.0);
    } else {
      const double sk = bp[k];
      left.f1 = [=](double t) {
        return std::pow(std::abs(dphi(k, t - sk) - mL), p) * std::pow(t - first, 1.0 - p);
      };
      add_term(std::move(left), bp[k], bp[k + 1], 0.0, 0.0);
    }

    Term right;
    right.dim = 1;
    right.factor = 2.0 / (p - 1.0);
    if (k + 1 == P) {
      const double h = bp[P] - bp[P - 1];
      const double c2 = pieces[k][2], c3 = pieces[k][3];
      // w = last - s; phi'(s) - phi'(last) = -w (2 c2 + 3 c3 (2h - w)).
      right.f1 = [=](double w) {
        return std::pow(std::abs(2.0 * c2 + 3.0 * c3 * (2.0 * h - w)), p) * w;
      };
      add_term(std::move(right), 0.0, h, 0.0, 0.0);
    } else {
      const double sk = bp[k];
      right.f1 = [=](double s) {
        return std::pow(std::abs(dphi(k, s - sk) - mR), p) * std::pow(last - s, 1.0 - p);
      };
      add_term(std::move(right), bp[k], bp[k + 1], 0.0, 0.0);
    }
  }

  const double tail_pair =
      mL == mR ? 0.0
               : 2.0 * std::pow(std::abs(mL - mR), p) *
                     rectangle_weight(-std::numeric_limits<double>::infinity(), first, last,
                                      std::numeric_limits<double>::infinity(), p);

  // Global adaptive refinement: always split the region with the largest error.
  auto by_error = [&regions](std::size_t a, std::size_t b) {
    if (regions[a].error != regions[b].error) return regions[a].error < regions[b].error;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> queue(by_error);
  std::vector<char> active(regions.size(), 1);
  double total = tail_pair;
  double error = 0.0;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    queue.push(i);
    total += regions[i].value;
    error += regions[i].error;
  }

  std::size_t live = regions.size();
  std::size_t refinements = 0;
  while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (live >= cfg.max_regions) {
      std::ostringstream msg;
      msg << "continuous_besov: region budget " << cfg.max_regions
          << " exhausted; estimate " << total << ", error " << error << ", target rel "
          << cfg.rel_tol;
      throw NumericalError(msg.str());
    }
    const std::size_t top = queue.top();
    queue.pop();
    active[top] = 0;
    total -= regions[top].value;
    error -= regions[top].error;
    const auto children = split(terms, regions[top]);
    live += children.size() - 1;
    for (Region child : children) {
      evaluate(terms, child);
      regions.push_back(child);
      active.push_back(1);
      total += child.value;
      error += child.error;
      queue.push(regions.size() - 1);
    }
    // Reset running sums periodically to avoid drift from repeated subtraction.
    if (++refinements % 256 == 0) {
      CompensatedSum v, er;
      v += tail_pair;
      for (std::size_t i = 0; i < regions.size(); ++i) {
        if (active[i]) {
          v += regions[i].value;
          er += regions[i].error;
        }
      }
      total = v.value();
      error = er.value();
    }
  }

  CompensatedSum v, er;
  v += tail_pair;
  std::size_t count = 0;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!active[i]) continue;
    v += regions[i].value;
    er += regions[i].error;
    ++count;
  }
  return {v.value(), er.value(), false, count};
}

}  // namespace sobext::besov
