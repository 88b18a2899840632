#include <cmath>
#include <vector>

#include "doctest.h"
#include "qbsde/ensemble.hpp"
#include "qbsde/math_util.hpp"
#include "qbsde/sde.hpp"

using namespace qbsde;

TEST_CASE("brownian increments") {
  SUBCASE("same seed twice gives identical arrays") {
    const auto a = simulate_brownian(TimeGrid(1.0, 16), 500, 2, 99);
    const auto b = simulate_brownian(TimeGrid(1.0, 16), 500, 2, 99);
    CHECK(a.increments == b.increments);
  }

  SUBCASE("variance of increments sits in the chi-square band") {
    const int m = 100000;
    const auto ens = simulate_brownian(TimeGrid(1.0, 1), m, 1, 7);
    const double var = sample_variance(ens.increments);
    const double band = 5.0 * std::sqrt(2.0 / m);
    CHECK(var > 1.0 - band);
    CHECK(var < 1.0 + band);
    CHECK(std::abs(mean(ens.increments)) < 5.0 / std::sqrt(static_cast<double>(m)));
  }

  SUBCASE("distinct seeds decorrelate") {
    const int m = 100000;
    const auto a = simulate_brownian(TimeGrid(1.0, 1), m, 1, 1);
    const auto b = simulate_brownian(TimeGrid(1.0, 1), m, 1, 2);
    std::vector<double> prod(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      prod[static_cast<std::size_t>(i)] =
          a.increments[static_cast<std::size_t>(i)] * b.increments[static_cast<std::size_t>(i)];
    CHECK(std::abs(mean(prod)) < 5.0 / std::sqrt(static_cast<double>(m)));
  }

  SUBCASE("coarsening preserves the terminal value") {
    const auto fine = simulate_brownian(TimeGrid(1.0, 64), 200, 1, 5);
    const auto coarse = coarsen(fine, 4);
    const auto bf = brownian_terminal(fine);
    const auto bc = brownian_terminal(coarse);
    for (int m = 0; m < 200; ++m)
      CHECK(bf[static_cast<std::size_t>(m)] ==
            doctest::Approx(bc[static_cast<std::size_t>(m)]).epsilon(1e-14));
  }
}

TEST_CASE("euler-maruyama") {
  SUBCASE("frozen dynamics") {
    auto ens = simulate_brownian(TimeGrid(1.0, 8), 50, 1, 3);
    SdeCoefficients frozen{[](double, double) { return 0.0; },
                           [](double, double) { return 0.0; }, 0.0, 0.0};
    simulate_sde(frozen, 0.0, 1.5, ens);
    for (int m = 0; m < ens.paths; ++m)
      for (int i = 0; i <= 8; ++i) CHECK(ens.state(m, i) == 1.5);
  }

  SUBCASE("pure brownian marginals") {
    auto ens = simulate_brownian(TimeGrid(1.0, 32), 100000, 1, 17);
    simulate_sde(brownian_coefficients(), 0.0, 0.0, ens);
    std::vector<double> xt(static_cast<std::size_t>(ens.paths));
    for (int m = 0; m < ens.paths; ++m) xt[static_cast<std::size_t>(m)] = ens.state(m, 32);
    CHECK(std::abs(mean(xt)) < 5.0 / std::sqrt(1e5));
    CHECK(sample_variance(xt) == doctest::Approx(1.0).epsilon(0.03));
  }

  SUBCASE("ornstein-uhlenbeck terminal variance") {
    auto ens = simulate_brownian(TimeGrid(1.0, 512), 100000, 1, 23);
    SdeCoefficients ou{[](double, double x) { return -x; },
                       [](double, double) { return 1.0; }, 1.0, 1.0};
    simulate_sde(ou, 0.0, 0.0, ens);
    std::vector<double> xt(static_cast<std::size_t>(ens.paths));
    for (int m = 0; m < ens.paths; ++m) xt[static_cast<std::size_t>(m)] = ens.state(m, 512);
    const double target = 0.43233235838169365;  // (1 - e^{-2}) / 2
    const double tol = 3.0 * target * std::sqrt(2.0 / 1e5) + 1e-3;  // 3 SE + O(dt)
    CHECK(std::abs(sample_variance(xt) - target) < tol);
  }

  SUBCASE("start time must be a grid node; states frozen before it") {
    auto ens = simulate_brownian(TimeGrid(1.0, 8), 40, 1, 3);
    CHECK_THROWS_AS(simulate_sde(brownian_coefficients(), 0.33, 0.0, ens),
                    std::invalid_argument);
    simulate_sde(brownian_coefficients(), 0.5, 2.0, ens);
    for (int m = 0; m < 40; ++m)
      for (int i = 0; i <= 4; ++i) CHECK(ens.state(m, i) == 2.0);
  }

  SUBCASE("weak first-order bias in mean and variance (coupled grids)") {
    // OU from x0 = 1; nested ensembles share the Brownian path, so the
    // Monte Carlo noise cancels in bias differences across N.
    const int m = 20000;
    auto fine = simulate_brownian(TimeGrid(1.0, 512), m, 1, 31);
    SdeCoefficients ou{[](double, double x) { return -x; },
                       [](double, double) { return 1.0; }, 1.0, 1.0};
    std::vector<double> means, vars;
    for (int factor : {8, 4, 2, 1}) {  // N = 64, 128, 256, 512
      auto ens = factor == 1 ? fine : coarsen(fine, factor);
      simulate_sde(ou, 0.0, 1.0, ens);
      std::vector<double> xt(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) xt[static_cast<std::size_t>(i)] = ens.state(i, ens.grid.steps);
      means.push_back(mean(xt));
      vars.push_back(sample_variance(xt));
    }
    const double dm1 = means[0] - means[1], dm2 = means[1] - means[2];
    const double dv1 = vars[0] - vars[1], dv2 = vars[1] - vars[2];
    CHECK(std::abs(dm1) > std::abs(dm2));  // bias shrinks when N doubles
    CHECK(std::abs(dv1) > std::abs(dv2));
    CHECK(dm1 / dm2 > 1.5);
    CHECK(dm1 / dm2 < 3.0);
    CHECK(dv1 / dv2 > 1.5);
    CHECK(dv1 / dv2 < 3.0);
  }

  SUBCASE("gronwall-style pathwise envelope") {
    const int m = 2000;
    auto ens = simulate_brownian(TimeGrid(1.0, 128), m, 1, 41);
    SdeCoefficients ou{[](double, double x) { return 0.5 * (1.0 - x); },
                       [](double, double x) { return 1.0 / (1.0 + 0.1 * x * x); }, 0.5, 1.0};
    simulate_sde(ou, 0.0, 0.7, ens);
    const double beta = 0.5, horizon = 1.0;
    for (int p = 0; p < m; ++p) {
      double supx = 0.0, supm = 0.0, mart = 0.0, x = 0.7;
      for (int i = 0; i < 128; ++i) {
        supx = std::max(supx, std::abs(ens.state(p, i)));
        mart += ens.increment(p, i) / (1.0 + 0.1 * x * x);
        x = ens.state(p, i + 1);
        supm = std::max(supm, std::abs(mart));
      }
      supx = std::max(supx, std::abs(ens.state(p, 128)));
      const double envelope = (0.7 + beta * horizon + supm) * std::exp(beta * horizon);
      CHECK(supx <= envelope * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("exponential moments of the running supremum") {
  SUBCASE("lambda = 0 gives exactly one") {
    auto ens = simulate_brownian(TimeGrid(1.0, 16), 300, 1, 3);
    simulate_sde(brownian_coefficients(), 0.0, 0.0, ens);
    const auto est = estimate_exp_moment(ens, 0.0, 1.0);
    CHECK(est.estimate == 1.0);
    CHECK(est.log_estimate == 0.0);
  }

  SUBCASE("p = 2 is rejected at the boundary") {
    auto ens = simulate_brownian(TimeGrid(1.0, 4), 10, 1, 3);
    simulate_sde(brownian_coefficients(), 0.0, 0.0, ens);
    CHECK_THROWS_AS(estimate_exp_moment(ens, 1.0, 2.0), std::invalid_argument);
  }

  SUBCASE("overflow is reported as an infinite moment") {
    auto ens = simulate_brownian(TimeGrid(1.0, 4), 100, 1, 3);
    simulate_sde(brownian_coefficients(), 0.0, 0.0, ens);
    CHECK_THROWS_AS(estimate_exp_moment(ens, 1e6, 1.9), OverflowError);
  }

  SUBCASE("agrees with an independent fine-grid brute force") {
    // E[e^{sup |B_t|}] on [0, 1]; the coarse estimate must sit below the
    // fine one (discrete sup grows with refinement) and within a modest
    // discretization allowance of it.
    auto coarse = simulate_brownian(TimeGrid(1.0, 64), 20000, 1, 51);
    simulate_sde(brownian_coefficients(), 0.0, 0.0, coarse);
    const auto ec = estimate_exp_moment(coarse, 1.0, 1.0);

    auto fine = simulate_brownian(TimeGrid(1.0, 2048), 20000, 1, 77);
    simulate_sde(brownian_coefficients(), 0.0, 0.0, fine);
    const auto ef = estimate_exp_moment(fine, 1.0, 1.0);

    CHECK(ec.log_estimate < ef.log_estimate + 3.0 * (ec.se_log + ef.se_log));
    CHECK(ef.log_estimate - ec.log_estimate < 0.10);
    // Reference value of the continuous functional, reflection series.
    CHECK(std::abs(ef.log_estimate - std::log(4.102324248594429)) <
          0.05 + 3.0 * ef.se_log);
    CHECK(ef.fitted_c == doctest::Approx(ef.estimate));  // x0 = 0
  }

  SUBCASE("fitted C solves C exp(lambda C |x0|^p) = estimate") {
    auto ens = simulate_brownian(TimeGrid(1.0, 32), 5000, 1, 5);
    simulate_sde(brownian_coefficients(), 0.0, 0.8, ens);
    const auto est = estimate_exp_moment(ens, 0.5, 1.2);
    const double lhs = std::log(est.fitted_c) +
                       0.5 * est.fitted_c * std::pow(0.8, 1.2);
    CHECK(lhs == doctest::Approx(est.log_estimate).epsilon(1e-6));
  }
}

TEST_CASE("sde coefficient certificate") {
  SdeCoefficients ou{[](double, double x) { return -x; },
                     [](double, double) { return 1.0; }, 1.0, 1.0};
  CHECK(certify_sde(ou, 2000, 1e-9, 7).pass);
  SdeCoefficients bad{[](double, double x) { return -2.0 * x; },
                      [](double, double) { return 1.0; }, 1.0, 1.0};
  CHECK_FALSE(certify_sde(bad, 2000, 1e-9, 7).pass);
}
