#include <cmath>
#include <vector>

#include "doctest.h"
#include "qbsde/characteristics.hpp"
#include "qbsde/ensemble.hpp"
#include "qbsde/rng.hpp"

using namespace qbsde;

TEST_CASE("characteristic flow closed forms") {
  CHECK(characteristic_flow(AlphaProcess(), 0.0, 0.8, 1.7, 0.2) == 1.7);
  CHECK(characteristic_flow(AlphaProcess::constant(1.0), 0.0, 1.0, 0.0, 0.0) ==
        doctest::Approx(1.0));
  // x e^{beta dt} + a (e^{beta dt} - 1)/beta with a = beta = x = dt = 1.
  CHECK(characteristic_flow(AlphaProcess::constant(1.0), 1.0, 1.0, 1.0, 0.0) ==
        doctest::Approx(2.0 * std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK_THROWS_AS(characteristic_flow(AlphaProcess(), 0.0, 0.5, 1.0, 0.7),
                  std::invalid_argument);
}

TEST_CASE("flow property v(u;t,x) = v(u;r,v(r;t,x))") {
  const AlphaProcess alpha({0.0, 0.3, 0.7}, {0.5, 1.5, 0.2});
  const double beta = 0.9;
  const CounterRng rng(5, RngStream::Scratch);
  for (int s = 0; s < 200; ++s) {
    const auto c = static_cast<std::uint64_t>(s);
    double u = rng.uniform(c, 0, 0), r = rng.uniform(c, 1, 0), t = rng.uniform(c, 2, 0);
    if (u > r) std::swap(u, r);
    if (r > t) std::swap(r, t);
    if (u > r) std::swap(u, r);
    const double x = 3.0 * rng.uniform(c, 3, 0);
    const double inner = characteristic_flow(alpha, beta, t, x, r);
    const double through = characteristic_flow(alpha, beta, r, inner, u);
    const double direct = characteristic_flow(alpha, beta, t, x, u);
    CHECK(direct == doctest::Approx(through).epsilon(1e-10));
  }
}

TEST_CASE("psi for the linear h") {
  SUBCASE("s = t gives the identity profile") {
    CHECK(psi_linear(AlphaProcess::constant(2.0), 3.0, 0.4, 0.4, 1.25) == 1.25);
  }
  SUBCASE("closed form 2e") {
    CHECK(psi_linear(AlphaProcess(), 1.0, 0.0, 1.0, 2.0) ==
          doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-12));
  }
  SUBCASE("transport identity psi_t = h psi_x by finite differences") {
    const AlphaProcess alpha({0.0, 0.4}, {0.6, 1.1});
    const double beta = 0.8, s = 0.1, h = 1e-4;
    const CounterRng rng(9, RngStream::Scratch);
    for (int k = 0; k < 50; ++k) {
      const auto c = static_cast<std::uint64_t>(k);
      const double t = 0.3 + 0.6 * rng.uniform(c, 0, 0);
      const double x = 0.2 + 3.0 * rng.uniform(c, 1, 0);
      const double pt =
          (psi_linear(alpha, beta, s, t + h, x) - psi_linear(alpha, beta, s, t - h, x)) /
          (2.0 * h);
      const double px =
          (psi_linear(alpha, beta, s, t, x + h) - psi_linear(alpha, beta, s, t, x - h)) /
          (2.0 * h);
      CHECK(px >= 1.0);  // psi_x = e^{beta (t-s)} >= 1
      const double hval = alpha.value(t) + beta * x;
      CHECK(std::abs(pt - hval * px) < 1e-6);
    }
  }
  SUBCASE("monotone in x") {
    const AlphaProcess alpha = AlphaProcess::constant(0.3);
    double prev = -1.0;
    for (double x = 0.0; x <= 5.0; x += 0.25) {
      const double v = psi_linear(alpha, 0.5, 0.0, 0.8, x);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("theta transform") {
  SUBCASE("rho = 0 gives unit speed") {
    const ThetaTransform tr([](double) { return 0.0; }, 1.0, 1e4, 32);
    CHECK(tr.theta(2.5) == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(tr.psi(0.0, 0.7, 1.3) == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("rho(u) = u solves v' = 1 + v") {
    const ThetaTransform tr([](double u) { return u; }, 1.0, 1e6, 64);
    for (const double x : {0.0, 0.5, 2.0, 10.0}) {
      for (const double dt : {0.1, 0.5, 1.0}) {
        const double expected = (1.0 + x) * std::exp(dt) - 1.0;
        CHECK(tr.psi(0.0, dt, x) == doctest::Approx(expected).epsilon(1e-6));
      }
    }
  }
  SUBCASE("round trip inverse") {
    const ThetaTransform tr([](double u) { return 0.5 * u * u; }, 1.0, 1e4, 64);
    for (const double x : {0.0, 1.0, 10.0}) {
      CHECK(tr.theta_inverse(tr.theta(x)) == doctest::Approx(x).epsilon(1e-8));
    }
  }
  SUBCASE("agrees with the linear psi when rho(u) = beta u, alpha constant") {
    const double beta = 0.7, a = 0.4;
    const ThetaTransform tr([beta](double u) { return beta * u; }, a, 1e6, 64);
    const AlphaProcess alpha = AlphaProcess::constant(a);
    for (const double x : {0.0, 0.8, 3.0}) {
      const double lin = psi_linear(alpha, beta, 0.0, 1.0, x);
      CHECK(tr.psi(0.0, 1.0, x) == doctest::Approx(lin).epsilon(1e-6));
    }
  }
  SUBCASE("non-integrable h is reported") {
    // rho(u) = u^3 makes int du/h converge: Theta is bounded, so a long
    // horizon exhausts its range.
    const ThetaTransform tr([](double u) { return u * u * u; }, 1.0, 1e6, 64);
    CHECK_THROWS_AS(tr.psi(0.0, 10.0, 1.0), OverflowError);
  }
}

TEST_CASE("a priori bound at t = 0") {
  SUBCASE("constant terminal, zero alpha") {
    AssumptionParams p;
    p.beta = 0.4;
    p.gamma = 1.7;
    p.horizon = 1.0;
    const std::vector<double> xi(64, 3.0);
    const auto b = apriori_bound(p, xi, 7);
    CHECK(b.value == doctest::Approx(std::exp(0.4) * 3.0).epsilon(1e-12));
    CHECK(b.se == doctest::Approx(0.0));
  }

  SUBCASE("gaussian closed form log E[e^{|B_1|}]") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 1), 100000, 1, 21);
    const std::vector<double> xi = brownian_terminal(ens);
    AssumptionParams p;  // beta = 0, gamma = 1
    p.gamma = 1.0;
    const auto b = apriori_bound(p, xi, 21);
    const double expected = 1.0203934015364953;  // log(2 sqrt(e) Phi(1))
    CHECK(std::abs(b.value - expected) < 3.0 * b.se + 1e-6);
    CHECK(b.se > 0.0);
    CHECK(b.ci_lo < b.value);
    CHECK(b.value < b.ci_hi);
  }

  SUBCASE("monotone in beta and in alpha") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 1), 2000, 1, 3);
    const std::vector<double> xi = brownian_terminal(ens);
    AssumptionParams p;
    p.gamma = 0.8;
    const double base = apriori_bound(p, xi, 5).value;
    AssumptionParams pb = p;
    pb.beta = 0.3;
    CHECK(apriori_bound(pb, xi, 5).value > base);
    AssumptionParams pa = p;
    pa.alpha = AlphaProcess::constant(0.2);
    CHECK(apriori_bound(pa, xi, 5).value > base);
  }

  SUBCASE("huge exponents overflow") {
    AssumptionParams p;
    p.gamma = 1.0;
    const std::vector<double> xi = {1e3, std::exp(30.0)};  // e.g. xi ~ exp(B^2)
    CHECK_THROWS_AS(apriori_bound(p, xi, 1), OverflowError);
  }
}
