#include <cmath>
#include <vector>

#include "doctest.h"
#include "qbsde/alpha_process.hpp"
#include "qbsde/driver.hpp"
#include "qbsde/rng.hpp"
#include "qbsde/terminal.hpp"
#include "qbsde/time_grid.hpp"

using namespace qbsde;

namespace {
AssumptionParams params(double beta, double gamma, AlphaProcess alpha = AlphaProcess(),
                        double horizon = 1.0) {
  AssumptionParams p;
  p.beta = beta;
  p.gamma = gamma;
  p.alpha = std::move(alpha);
  p.horizon = horizon;
  return p;
}
}  // namespace

TEST_CASE("driver evaluation on the built-in families") {
  const std::vector<double> z1 = {1.0};
  const std::vector<double> z11 = {1.0, 1.0};

  const auto quad = DriverSpec::pure_quadratic(params(0.0, 2.0));
  CHECK(quad.eval(0.3, -7.0, z1) == doctest::Approx(1.0));  // (gamma/2)|z|^2

  const auto zero = DriverSpec::zero(params(0.0, 1.0));
  CHECK(zero.eval(0.9, 4.2, z1) == 0.0);

  const auto lpq = DriverSpec::linear_plus_quadratic(
      params(1.0, 2.0, AlphaProcess::constant(0.5)), 1.0, 2);
  CHECK(lpq.eval(0.0, -1.0, z11) == doctest::Approx(1.5));  // 0.5 - 1 + 2

  CHECK_THROWS_AS(quad.eval(0.0, 0.0, z11), std::invalid_argument);  // dim mismatch
  CHECK_THROWS_AS(quad.eval(2.0, 0.0, z1), std::invalid_argument);   // t > T
}

TEST_CASE("parameter invariants are named") {
  CHECK_THROWS_WITH_AS(DriverSpec::pure_quadratic(params(0.0, 0.0)),
                       "gamma > 0 violated", std::invalid_argument);
  CHECK_THROWS_AS(DriverSpec::pure_quadratic(params(-1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("assumption certificates") {
  SUBCASE("pure quadratic is convex up to rounding") {
    const auto d = DriverSpec::pure_quadratic(params(0.0, 1.0), 2);
    const auto cert = certify_assumptions(d, 5000, 1e-9, 11);
    CHECK(cert.convexity_violation <= 1e-9);
    CHECK(cert.lipschitz_violation == 0.0);
    CHECK(cert.growth_violation == 0.0);
    CHECK(cert.pass);
  }

  SUBCASE("|z| passes exactly when alpha covers the AM-GM gap") {
    const double gamma = 2.0;
    // rho(u) = u tabulated; |z| <= 1/(2 gamma) + (gamma/2)|z|^2.
    std::vector<double> zs = {0.0, 1.0, 20.0};
    std::vector<double> rho = {0.0, 1.0, 20.0};
    const auto ok = DriverSpec::convex_custom(
        params(0.0, gamma, AlphaProcess::constant(1.0 / (2.0 * gamma))), zs, rho, 0.0);
    const auto cert = certify_assumptions(ok, 5000, 1e-9, 11);
    CHECK(cert.growth_violation <= 1e-12);
    CHECK(cert.pass);

    const auto starved = DriverSpec::convex_custom(
        params(0.0, gamma, AlphaProcess::constant(0.0)), zs, rho, 0.0);
    const auto bad = certify_assumptions(starved, 5000, 1e-9, 11);
    CHECK(bad.growth_violation > 1e-3);  // fails near small |z|
    CHECK_FALSE(bad.pass);
  }

  SUBCASE("a concave table is caught by the midpoint test") {
    std::vector<double> zs, rho;
    for (int i = 0; i <= 40; ++i) {
      const double u = 0.5 * i;
      zs.push_back(u);
      rho.push_back(-u * u);  // concave witness
    }
    const auto d = DriverSpec::convex_custom(params(0.0, 1.0), zs, rho, 0.0);
    const auto cert = certify_assumptions(d, 5000, 1e-6, 11);
    CHECK(cert.convexity_violation > 1e-6);
    CHECK_FALSE(cert.pass);
  }

  SUBCASE("y slope beyond beta breaks the Lipschitz check") {
    const auto d = DriverSpec::linear_in_y(params(0.5, 1.0), 1.0);
    const auto cert = certify_assumptions(d, 5000, 1e-9, 11);
    CHECK(cert.lipschitz_violation > 0.1);
  }

  SUBCASE("deterministic per seed") {
    const auto d = DriverSpec::linear_plus_quadratic(params(0.7, 1.3), -0.7);
    const auto a = certify_assumptions(d, 3000, 1e-9, 42);
    const auto b = certify_assumptions(d, 3000, 1e-9, 42);
    CHECK(a.convexity_violation == b.convexity_violation);
    CHECK(a.lipschitz_violation == b.lipschitz_violation);
    CHECK(a.growth_violation == b.growth_violation);
  }
}

TEST_CASE("alpha process integrals") {
  const AlphaProcess a({0.0, 0.5, 0.8}, {1.0, 2.0, 0.25});

  SUBCASE("piecewise integral matches a Riemann refinement") {
    const double exact = a.integral(0.0, 1.0);
    double riemann = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) riemann += a.value((i + 0.5) / n) / n;
    CHECK(exact == doctest::Approx(riemann).epsilon(1e-7));
    CHECK(exact == doctest::Approx(0.5 + 0.6 + 0.05));
  }

  SUBCASE("weighted integral agrees with quadrature") {
    const double beta = 0.8;
    const double exact = a.weighted_integral(0.1, 0.9, beta);
    double riemann = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      const double r = 0.1 + 0.8 * (i + 0.5) / n;
      riemann += a.value(r) * std::exp(beta * (r - 0.1)) * 0.8 / n;
    }
    CHECK(exact == doctest::Approx(riemann).epsilon(1e-8));
  }

  SUBCASE("budget truncation") {
    // Masses 0.5 | 0.6 | 0.25/unit: budget 1.2 is reached at t = 1.2.
    const AlphaProcess cut = a.truncated_at_budget(1.2);
    CHECK(cut.value(0.55) == 2.0);
    CHECK(cut.value(1.1) == 0.25);
    CHECK(cut.value(1.3) == 0.0);
    CHECK(cut.integral(0.0, 5.0) == doctest::Approx(1.2));
    CHECK(a.truncated_at_budget(kInf).integral(0.0, 1.0) ==
          doctest::Approx(a.integral(0.0, 1.0)));
  }

  SUBCASE("invariants") {
    CHECK_THROWS_AS(AlphaProcess({0.5}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(AlphaProcess({0.0}, {-1.0}), std::invalid_argument);
  }
}

TEST_CASE("terminal truncation is a two-sided clamp") {
  TerminalSpec spec;
  spec.kind = TerminalKind::Brownian;
  spec.clip_pos = 1.0;
  spec.clip_neg = 1.0;
  CHECK(spec.eval(2.5, 0.0) == 1.0);
  CHECK(spec.eval(-3.0, 0.0) == -1.0);
  CHECK(spec.eval(0.25, 0.0) == 0.25);

  TerminalSpec bad = spec;
  bad.growth_p = 2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("time grid node lookup") {
  const TimeGrid g(1.0, 256);
  CHECK(g.index_of(0.0) == 0);
  CHECK(g.index_of(1.0) == 256);
  CHECK(g.index_of(0.5) == 128);
  CHECK_THROWS_AS(g.index_of(0.3141), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
}
