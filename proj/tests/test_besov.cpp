#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sobext/besov.hpp"
#include "sobext/errors.hpp"

using namespace sobext;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

besov::SiteSet sites_of(std::vector<double> v) { return besov::make_sites(v); }

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }
}  // namespace

TEST_CASE("make_sites") {
  const auto s = sites_of({3, 1, 2});
  REQUIRE(s.size() == 3);
  CHECK(s[0] == 1);
  CHECK(s[2] == 3);
  CHECK(sites_of({0}).size() == 1);
  CHECK_THROWS_AS(sites_of({}), DomainError);
  CHECK_THROWS_AS(sites_of({1, 2, 1}), DomainError);
  CHECK_THROWS_AS(sites_of({1, NAN}), DomainError);
}

TEST_CASE("slope data") {
  SUBCASE("affine data") {
    const auto sd = besov::slope_data(sites_of({0, 1, 3}), {{0, 1, 3}});
    CHECK(sd.slopes == std::vector<double>{1, 1, 1});
    CHECK(sd.second_order == std::vector<double>{0, 0});
  }
  SUBCASE("left tie-break") {
    const auto sd = besov::slope_data(sites_of({0, 1, 2}), {{0, 0, 2}});
    CHECK(sd.neighbor == std::vector<std::size_t>{1, 0, 1});
    CHECK(sd.slopes == std::vector<double>{0, 0, 2});
    CHECK(sd.second_order[0] == 0.0);
    CHECK(sd.second_order[1] == 4.0);
    CHECK(sd.gaps == std::vector<double>{1, 1});
  }
  SUBCASE("single site") {
    const auto sd = besov::slope_data(sites_of({5}), {{7}});
    CHECK(sd.neighbor.empty());
    CHECK(sd.slopes.empty());
    CHECK(sd.second_order.empty());
  }
  SUBCASE("misaligned") {
    CHECK_THROWS_AS(besov::slope_data(sites_of({0, 1}), {{0}}), DomainError);
  }
  SUBCASE("nearest neighbour matches exhaustive scan") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v;
      for (int i = 0; i < 9; ++i) v.push_back(u(rng));
      // Include exact ties on a coarse lattice half the time.
      if (trial % 2) for (auto& x : v) x = std::round(x * 2) / 2 + 0.25 * (&x - v.data());
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      std::vector<double> phi;
      for (double x : v) phi.push_back(std::sin(3 * x));
      const auto sd = besov::slope_data(besov::make_sites(v), {phi});
      for (std::size_t k = 0; k < v.size(); ++k) {
        const auto n = oracle::nearest(v, k);
        CHECK(std::fabs(v[sd.neighbor[k]] - v[k]) == std::fabs(v[n] - v[k]));
        CHECK(sd.neighbor[k] == n);
      }
    }
  }
}

TEST_CASE("interaction weight examples") {
  const auto e = core::make_exponents(4);
  const auto s = sites_of({0, 1, 2, 3});
  // One-based (2,3) and (1,4) in the usual notation.
  const double a23 = besov::interaction_weight(s, 1, 2, e);
  CHECK(a23 == doctest::Approx((1 - 0.25 - 0.25 + 1.0 / 9.0) / 6.0).epsilon(1e-14));
  CHECK(rel(a23, oracle::rectangle(0, 1, 2, 3, 4)) < 1e-10);
  const double a14 = besov::interaction_weight(s, 0, 3, e);
  CHECK(a14 == doctest::Approx(1.0 / 54.0).epsilon(1e-14));
  CHECK(rel(a14, oracle::rectangle(-kInf, 0, 3, kInf, 4)) < 1e-9);
  const double scaled = besov::interaction_weight(sites_of({0, 2, 4, 6}), 1, 2, e);
  CHECK(scaled == doctest::Approx(0.25 * a23).epsilon(1e-14));
  CHECK_THROWS_AS(besov::interaction_weight(s, 2, 2, e), DomainError);
  CHECK_THROWS_AS(besov::interaction_weight(s, 2, 1, e), DomainError);
  CHECK_THROWS_AS(besov::interaction_weight(s, 0, 4, e), DomainError);
}

TEST_CASE("closed form against quadrature") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> width(0.05, 2.0), gap(0.02, 2.0), shift(-5, 5);
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    for (int i = 0; i < 12; ++i) {
      const double a = shift(rng), b = a + width(rng), c = b + gap(rng), d = c + width(rng);
      // Cycle through finite, left-infinite, right-infinite and doubly infinite.
      const double A = (i % 4 == 1 || i % 4 == 3) ? -kInf : a;
      const double D = (i % 4 == 2 || i % 4 == 3) ? kInf : d;
      const double ref = oracle::rectangle(A, b, c, D, p);
      CHECK(rel(besov::rectangle_weight(A, b, c, D, p), ref) < 1e-9);
    }
  }
}

TEST_CASE("near-touching rectangles stay accurate") {
  // The expanded four-term form cancels catastrophically here. Reference in
  // long double from the exact p = 3 antiderivative on the rounded endpoints.
  for (double g : {1e-3, 1e-6, 1e-9}) {
    const double a = 0, b = 1, c = 1 + g, d = 2 + g;
    const long double A = a, B = b, C = c, D = d;
    const long double exact = (1 / (C - B) - 1 / (C - A) - 1 / (D - B) + 1 / (D - A)) / 2;
    CHECK(rel(besov::rectangle_weight(a, b, c, d, 3.0), static_cast<double>(exact)) < 1e-12);
  }
}

TEST_CASE("weight scaling law") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (double p : {2.5, 4.0, 6.0}) {
    const auto e = core::make_exponents(p);
    std::vector<double> v{0.0, 0.3, 0.45, 1.1, 1.7, 2.0};
    const auto base = besov::make_sites(v);
    for (double lam : {0.5, 2.0, 7.0}) {
      const double c = u(rng);
      std::vector<double> w;
      for (double x : v) w.push_back(lam * x + c);
      const auto scaled = besov::make_sites(w);
      for (std::size_t k = 0; k < v.size(); ++k)
        for (std::size_t l = k + 1; l < v.size(); ++l)
          CHECK(rel(besov::interaction_weight(scaled, k, l, e),
                    std::pow(lam, 2 - p) * besov::interaction_weight(base, k, l, e)) < 1e-10);
    }
  }
}

TEST_CASE("energy examples") {
  const auto e = core::make_exponents(4);
  const auto r = besov::besov_energy(sites_of({0, 1, 2}), {{0, 0, 2}}, e);
  CHECK(r.K == 3);
  CHECK(r.second_order_part == doctest::Approx(256).epsilon(1e-14));
  CHECK(r.pair_part == doctest::Approx(16.0 / 24.0 + 16.0 / 8.0).epsilon(1e-13));
  CHECK(r.Q == doctest::Approx(256 + 8.0 / 3.0).epsilon(1e-13));
  CHECK(rel(r.Q, oracle::energy({0, 1, 2}, {0, 0, 2}, 4)) < 1e-9);

  CHECK(besov::besov_energy(sites_of({4}), {{1}}, e).Q == 0.0);
  CHECK(besov::besov_energy(sites_of({0, 0.5, 2, 3}), {{1, 2, 5, 7}}, e).Q == 0.0);
  CHECK_THROWS_AS(besov::besov_energy(sites_of({0, 1}), {{0, 1, 2}}, e), DomainError);
}

TEST_CASE("energy against oracle on random traces") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1), n(-1, 1);
  for (double p : {2.5, 4.0}) {
    const auto e = core::make_exponents(p);
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<double> s, phi;
      for (int i = 0; i < 6; ++i) s.push_back(u(rng) * 4);
      std::sort(s.begin(), s.end());
      for (double x : s) phi.push_back(n(rng) + x * x / 4);
      const auto r = besov::besov_energy(besov::make_sites(s), {phi}, e);
      CHECK(rel(r.Q, oracle::energy(s, phi, p)) < 1e-8);
      CHECK(r.Q == doctest::Approx(r.second_order_part + r.pair_part).epsilon(1e-15));
      CHECK(r.second_order_part >= 0);
      CHECK(r.pair_part >= 0);
    }
  }
}

TEST_CASE("affine invariance and homogeneity") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1), n(-2, 2);
  for (double p : {2.5, 3.0, 4.0, 6.0}) {
    const auto e = core::make_exponents(p);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> s, phi;
      for (int i = 0; i < 10; ++i) s.push_back(u(rng));
      const auto sites = besov::make_sites(s);
      for (double x : sites.sites()) phi.push_back(std::pow(x, 1.5) + 0.3 * n(rng));
      const double Q = besov::besov_energy(sites, {phi}, e).Q;
      const double a = std::round(n(rng) * 4) / 4, b = std::round(n(rng) * 4) / 4;
      std::vector<double> shifted;
      for (std::size_t i = 0; i < phi.size(); ++i) shifted.push_back(phi[i] + a * sites[i] + b);
      CHECK(rel(besov::besov_energy(sites, {shifted}, e).Q, Q) < 1e-12);
      for (double lam : {2.0, -0.5, 3.0}) {
        std::vector<double> scaled;
        for (double v : phi) scaled.push_back(lam * v);
        CHECK(rel(besov::besov_energy(sites, {scaled}, e).Q, std::pow(std::fabs(lam), p) * Q) < 1e-12);
      }
    }
  }
}

TEST_CASE("hermite extension") {
  SUBCASE("affine data reproduces the line") {
    const auto sites = sites_of({0, 1});
    const besov::TraceData tr{{0, 1}};
    const auto c = besov::hermite_extend(sites, tr, besov::slope_data(sites, tr));
    for (double s : {-3.0, -0.2, 0.0, 0.3, 0.77, 1.0, 5.0}) {
      CHECK(c.value(s) == doctest::Approx(s).epsilon(1e-15));
      CHECK(c.derivative(s) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("single site is constant") {
    const auto sites = sites_of({2});
    const besov::TraceData tr{{-4}};
    const auto c = besov::hermite_extend(sites, tr, besov::slope_data(sites, tr));
    CHECK(c.value(-10) == -4);
    CHECK(c.value(2) == -4);
    CHECK(c.derivative(7) == 0);
  }
  SUBCASE("interpolation and C1 against Hermite basis") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1), n(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> s, phi;
      for (int i = 0; i < 8; ++i) s.push_back(u(rng) * 3);
      const auto sites = besov::make_sites(s);
      for (std::size_t i = 0; i < sites.size(); ++i) phi.push_back(n(rng));
      const besov::TraceData tr{phi};
      const auto sd = besov::slope_data(sites, tr);
      const auto c = besov::hermite_extend(sites, tr, sd);
      for (std::size_t k = 0; k < sites.size(); ++k) {
        const double ulp = std::nextafter(std::fabs(phi[k]), INFINITY) - std::fabs(phi[k]);
        CHECK(std::fabs(c.value(sites[k]) - phi[k]) <= 2 * ulp + 1e-300);
        CHECK(c.derivative(sites[k]) == doctest::Approx(sd.slopes[k]).epsilon(1e-9));
      }
      for (std::size_t k = 0; k + 1 < sites.size(); ++k) {
        const double mid = 0.37 * sites[k] + 0.63 * sites[k + 1];
        const double ref = oracle::hermite(sites[k], sites[k + 1], phi[k], phi[k + 1], sd.slopes[k],
                                           sd.slopes[k + 1], mid);
        CHECK(c.value(mid) == doctest::Approx(ref).epsilon(1e-11));
      }
      CHECK(c.max_value_jump() <= 1e-12 * (1 + std::fabs(phi[0])) * 10);
      CHECK(c.max_derivative_jump() <= 1e-9);
      // Affine tails.
      const double lo = sites[0];
      CHECK(c.value(lo - 2) == doctest::Approx(phi[0] - 2 * sd.slopes[0]).epsilon(1e-12));
    }
  }
  SUBCASE("tie example") {
    const auto sites = sites_of({0, 1, 2});
    const besov::TraceData tr{{0, 0, 2}};
    const auto c = besov::hermite_extend(sites, tr, besov::slope_data(sites, tr));
    CHECK(c.value(1) == 0.0);
    CHECK(c.derivative(1) == 0.0);
  }
}
