#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "mwu/chaos.hpp"
#include "mwu/dynamics.hpp"
#include "mwu/metrics.hpp"
#include "mwu/orbit.hpp"
#include "oracles.hpp"

using namespace mwu;

// Randomized checks with fixed seeds, so failures reproduce.

TEST_SUITE("properties") {
  TEST_CASE("the map keeps the open interval and fixes b") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ua(0.1, 200.0), ub(0.01, 0.99), ux(1e-6, 1 - 1e-6);
    for (int i = 0; i < 5000; ++i) {
      const LinearTwoParams p{ua(rng), ub(rng)};
      const double x = ux(rng);
      const double y = step_linear2(x, p);
      CHECK(y > 0.0);
      CHECK(y < 1.0);
      CHECK(step_linear2(p.b, p) == doctest::Approx(p.b).epsilon(1e-14));
    }
  }

  TEST_CASE("reflection symmetry f_{a,1-b}(1-x) = 1 - f_{a,b}(x)") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ua(0.1, 60.0), ub(0.01, 0.99), ux(0.01, 0.99);
    for (int i = 0; i < 2000; ++i) {
      const double a = ua(rng), b = ub(rng), x = ux(rng);
      CHECK(std::abs(step_linear2(1 - x, {a, 1 - b}) - (1 - step_linear2(x, {a, b}))) < 1e-13);
    }
  }

  TEST_CASE("step agrees with the 50-digit oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ua(0.1, 80.0), ub(0.01, 0.99), ux(0.001, 0.999);
    for (int i = 0; i < 500; ++i) {
      const double a = ua(rng), b = ub(rng), x = ux(rng);
      const double ref = oracle::f(x, a, b);
      CHECK(std::abs(step_linear2(x, {a, b}) - ref) <= 4e-16 * std::max(1.0, a));
    }
  }

  TEST_CASE("cesaro mean approaches b on random parameters") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ua(4.5, 60.0), ub(0.15, 0.85);
    for (int i = 0; i < 12; ++i) {
      const LinearTwoParams p{ua(rng), ub(rng)};
      const auto o = iterate(MapSpec{p}, oracle::x_left(p.a), 10000, 200000);
      CHECK(std::abs(cesaro_average(o) - p.b) < 1e-3);
    }
  }

  TEST_CASE("simplex states stay on the simplex") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ur(0.5, 40.0), ux(0.05, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t m = 2 + trial % 4;
      SimplexParams sp;
      std::vector<double> x(m);
      for (std::size_t i = 0; i < m; ++i) {
        sp.rates.push_back(ur(rng));
        x[i] = ux(rng);
      }
      const double s = std::accumulate(x.begin(), x.end(), 0.0);
      for (double& v : x) v /= s;
      for (int n = 0; n < 200; ++n) {
        x = step_simplex(x, sp);
        CHECK(std::abs(std::accumulate(x.begin(), x.end(), 0.0) - 1.0) < 1e-14);
        for (double v : x) CHECK(v > 0.0);
      }
      const auto ref = oracle::simplex_step(x, sp.rates);
      const auto got = step_simplex(x, sp);
      for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-14);
    }
  }

  TEST_CASE("hetero step matches the oracle and conserves the integral") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ua(1.0, 40.0), ub(0.1, 0.9), ux(0.05, 0.95);
    for (int i = 0; i < 300; ++i) {
      const HeteroParams p{ua(rng), ua(rng), ub(rng), 0.4, 0.6};
      const double x = ux(rng), y = ux(rng);
      const auto [xn, yn] = step_hetero(x, y, p);
      const auto [xr, yr] = oracle::hetero_step(x, y, p.a1, p.a2, p.b, 0.4);
      CHECK(std::abs(xn - xr) < 1e-13);
      CHECK(std::abs(yn - yr) < 1e-13);
      // rounding xn, yn to doubles moves logit by ~eps/(x(1-x))
      const double i0 = hetero_invariant(x, y, p);
      const double eps = std::numeric_limits<double>::epsilon();
      const double cond = p.a1 / (yn * (1 - yn)) + p.a2 / (xn * (1 - xn)) + std::abs(i0);
      CHECK(std::abs(hetero_invariant(xn, yn, p) - i0) <= 8 * eps * cond);
      const auto [z, w] = step_hetero_logit(logit(x), logit(y), p);
      CHECK(std::abs(p.a1 * w - p.a2 * z - i0) <= 8 * eps * (std::abs(i0) + p.a1 * std::abs(w) + p.a2 * std::abs(z)));
    }
  }

  TEST_CASE("normalized social cost never drops below one") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.5, 80.0), ub(0.05, 0.95);
    for (int i = 0; i < 40; ++i) {
      const LinearTwoParams p{ua(rng), ub(rng)};
      const auto o = iterate(MapSpec{p}, 0.37, 2000, 5000);
      CHECK(normalized_social_cost(o, p) >= 1.0 - 1e-12);
    }
  }

  TEST_CASE("schwarzian is negative off the critical points") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ua(4.01, 100.0), ub(0.02, 0.98), ux(1e-4, 1 - 1e-4);
    for (int i = 0; i < 3000; ++i) {
      const LinearTwoParams p{ua(rng), ub(rng)};
      const double x = ux(rng);
      const auto cs = critical_structure(p);
      if (std::abs(x - cs.x_l) < 1e-6 || std::abs(x - cs.x_r) < 1e-6) continue;
      CHECK(schwarzian(p, x) < 0.0);
    }
  }

  TEST_CASE("critical images bracket b for a > 1/(b(1-b))") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ub(0.05, 0.95), ut(1.01, 20.0);
    for (int i = 0; i < 1000; ++i) {
      const double b = ub(rng);
      const double a = std::max(4.01, ut(rng) / (b * (1 - b)));
      const auto cs = critical_structure({a, b});
      CHECK(cs.y_min < b);
      CHECK(cs.y_max > b);
      CHECK(cs.x_l + cs.x_r == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("detected periods are minimal and close") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> ua(4.5, 54.0), ub(0.05, 0.95);
    for (int i = 0; i < 200; ++i) {
      const LinearTwoParams p{ua(rng), ub(rng)};
      const MapSpec m{p};
      const auto r = detect_period(m, oracle::x_left(p.a));
      if (!r.period) continue;
      const std::size_t n = *r.period;
      double x = r.orbit_points[0];
      for (std::size_t k = 0; k < n; ++k) x = step_linear2(x, p);
      CHECK(std::abs(x - r.orbit_points[0]) <= 1e-10);
      for (std::size_t d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        double z = r.orbit_points[0];
        for (std::size_t k = 0; k < d; ++k) z = step_linear2(z, p);
        CHECK(std::abs(z - r.orbit_points[0]) > 1e-10);
      }
    }
  }
}
