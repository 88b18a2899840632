#include <cmath>
#include <vector>

#include "doctest.h"
#include "qbsde/cole_hopf.hpp"
#include "qbsde/lsmc.hpp"
#include "qbsde/truncation.hpp"

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

TerminalSpec brownian_terminal_spec() {
  TerminalSpec t;
  t.kind = TerminalKind::Brownian;
  return t;
}

}  // namespace

TEST_CASE("zero driver with constant terminal is exact") {
  const auto ens = simulate_brownian(TimeGrid(1.0, 8), 2000, 1, 11);
  const auto driver = DriverSpec::zero(params(0.0, 1.0));
  TerminalSpec term;
  term.kind = TerminalKind::Constant;
  term.constant = 3.25;
  const auto sol = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
  CHECK(sol.y0 == doctest::Approx(3.25).epsilon(1e-14));
  for (int i = 0; i <= 8; ++i)
    for (int m = 0; m < 200; ++m) CHECK(std::abs(sol.y(i, m) - 3.25) < 1e-10);
  for (int i = 0; i < 8; ++i)
    for (int m = 0; m < 200; ++m) CHECK(std::abs(sol.z(i, m)) < 1e-10);
}

TEST_CASE("terminal layer is the terminal samples, bitwise") {
  const auto ens = simulate_brownian(TimeGrid(1.0, 16), 500, 1, 13);
  const auto driver = DriverSpec::pure_quadratic(params(0.0, 1.0));
  const auto term = brownian_terminal_spec();
  const auto xi = terminal_samples(term, ens);
  const auto sol = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
  for (int m = 0; m < ens.paths; ++m)
    CHECK(sol.y(16, m) == xi[static_cast<std::size_t>(m)]);
}

TEST_CASE("linear driver reproduces the deterministic exponential") {
  const auto ens = simulate_brownian(TimeGrid(1.0, 256), 10000, 1, 17);
  const auto driver = DriverSpec::linear_in_y(params(1.0, 1.0), 1.0);
  TerminalSpec term;
  term.kind = TerminalKind::Constant;
  term.constant = 1.0;
  const auto sol = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
  CHECK(std::abs(sol.y0 - std::exp(1.0)) < 0.05);
}

TEST_CASE("pure-quadratic driver against the exponential-transform oracle") {
  const auto ens = simulate_brownian(TimeGrid(1.0, 64), 20000, 1, 19);
  const auto driver = DriverSpec::pure_quadratic(params(0.0, 1.0));
  const auto term = brownian_terminal_spec();
  const auto sol = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
  CHECK(std::abs(sol.y0 - 0.5) < 0.02);

  // Z should sit near 1 through the bulk of the distribution.
  std::vector<double> zmid(static_cast<std::size_t>(ens.paths));
  for (int m = 0; m < ens.paths; ++m) zmid[static_cast<std::size_t>(m)] = sol.z(32, m);
  CHECK(std::abs(mean(zmid) - 1.0) < 0.05);
}

TEST_CASE("exponential-transform oracle") {
  SUBCASE("constant terminal with alpha tail") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 16), 4000, 1, 23);
    const auto alpha = AlphaProcess::constant(0.4);
    std::vector<double> xi(static_cast<std::size_t>(ens.paths), 2.0);
    const auto sol = cole_hopf_solve(1.3, alpha, xi, ens, RegressionBasis{});
    CHECK(sol.y0 == doctest::Approx(2.0 + 0.4).epsilon(1e-12));
    for (int i = 0; i <= 16; ++i) {
      const double expected = 2.0 + 0.4 * (1.0 - ens.grid.node(i));
      CHECK(sol.y(i, 5) == doctest::Approx(expected).epsilon(1e-10));
    }
    for (int i = 0; i < 16; ++i) CHECK(sol.z(i, 7) == doctest::Approx(0.0));
  }

  SUBCASE("brownian terminal: Y_t = B_t + gamma (T - t)/2, Z = 1") {
    const double gamma = 1.0;
    const auto ens = simulate_brownian(TimeGrid(1.0, 64), 20000, 1, 29);
    const auto xi = brownian_terminal(ens);
    const auto sol = cole_hopf_solve(gamma, AlphaProcess(), xi, ens, RegressionBasis{});
    CHECK(std::abs(sol.y0 - 0.5) < 0.015);

    double abs_err = 0.0;
    std::vector<double> zmid(static_cast<std::size_t>(ens.paths));
    const int layer = 32;
    for (int m = 0; m < ens.paths; ++m) {
      const double truth = ens.brownian(m, layer) + 0.5 * gamma * (1.0 - 0.5);
      abs_err += std::abs(sol.y(layer, m) - truth);
      zmid[static_cast<std::size_t>(m)] = sol.z(layer, m);
    }
    abs_err /= ens.paths;
    CHECK(abs_err < 0.04);
    CHECK(std::abs(mean(zmid) - 1.0) < 0.05);

    const auto ci = cole_hopf_y0_ci(gamma, AlphaProcess(), xi, ens);
    CHECK(ci.value == doctest::Approx(sol.y0).epsilon(1e-12));
    CHECK(ci.se > 0.0);
    CHECK(std::abs(ci.value - 0.5) < 3.0 * ci.se + 0.01);
  }

  SUBCASE("small gamma approaches the plain mean") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 8), 20000, 1, 31);
    const auto xi = brownian_terminal(ens);
    const auto sol = cole_hopf_solve(1e-3, AlphaProcess(), xi, ens, RegressionBasis{});
    CHECK(std::abs(sol.y0 - mean(xi)) < 1e-2);
  }
}

TEST_CASE("solver versus oracle on a shared ensemble") {
  const auto ens = simulate_brownian(TimeGrid(1.0, 64), 20000, 1, 37);
  const auto driver = DriverSpec::pure_quadratic(params(0.0, 1.0));
  const auto term = brownian_terminal_spec();
  const auto lsmc = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
  const auto xi = terminal_samples(term, ens);
  const auto oracle = cole_hopf_solve(1.0, AlphaProcess(), xi, ens, RegressionBasis{});
  const auto ci = cole_hopf_y0_ci(1.0, AlphaProcess(), xi, ens);
  CHECK(std::abs(lsmc.y0 - oracle.y0) < 3.0 * ci.se + 1.0 * ens.grid.dt());
}

TEST_CASE("truncated problems") {
  const auto driver =
      DriverSpec::pure_quadratic(params(0.0, 1.0, AlphaProcess::constant(0.5)));
  const auto term = brownian_terminal_spec();

  SUBCASE("infinity sentinels change nothing") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 16), 2000, 1, 41);
    const auto cut = build_truncated_problem(driver, term, kInf, kInf);
    const auto a = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
    const auto b =
        solve_backward_lsmc(cut.driver, cut.terminal, ens, RegressionBasis{}, PicardConfig{});
    CHECK(a.y0 == b.y0);
  }

  SUBCASE("terminal becomes the two-sided clamp") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 4), 3000, 1, 43);
    const auto cut = build_truncated_problem(driver, term, 1.0, 1.0);
    const auto xi = terminal_samples(term, ens);
    const auto xic = terminal_samples(cut.terminal, ens);
    for (int m = 0; m < ens.paths; ++m) {
      const auto mi = static_cast<std::size_t>(m);
      CHECK(xic[mi] == std::max(-1.0, std::min(xi[mi], 1.0)));
    }
  }

  SUBCASE("monotone in n for nonnegative terminals") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 4), 3000, 1, 47);
    TerminalSpec absterm;
    absterm.kind = TerminalKind::BrownianAbs;
    const auto c2 = build_truncated_problem(driver, absterm, 2.0, kInf);
    const auto c4 = build_truncated_problem(driver, absterm, 4.0, kInf);
    const auto x2 = terminal_samples(c2.terminal, ens);
    const auto x4 = terminal_samples(c4.terminal, ens);
    for (int m = 0; m < ens.paths; ++m)
      CHECK(x2[static_cast<std::size_t>(m)] <= x4[static_cast<std::size_t>(m)]);
  }

  SUBCASE("alpha budget is cut") {
    const auto cut = build_truncated_problem(driver, term, 1.0, 1.0);
    CHECK(cut.driver.params().alpha.integral(0.0, 10.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(build_truncated_problem(driver, term, 0.5, 1.0), std::invalid_argument);
  }
}

TEST_CASE("solver error paths") {
  SUBCASE("a failing assumption certificate refuses to solve") {
    std::vector<double> zs, rho;
    for (int i = 0; i <= 20; ++i) {
      zs.push_back(i);
      rho.push_back(-static_cast<double>(i) * i);
    }
    const auto concave = DriverSpec::convex_custom(params(0.0, 1.0), zs, rho, 0.0);
    const auto ens = simulate_brownian(TimeGrid(1.0, 4), 100, 1, 53);
    CHECK_THROWS_AS(solve_backward_lsmc(concave, brownian_terminal_spec(), ens,
                                        RegressionBasis{}, PicardConfig{}),
                    std::invalid_argument);
  }

  SUBCASE("picard divergence reports the layer") {
    // beta dt = 25 > 1: the fixed point iteration cannot contract.
    const auto stiff = DriverSpec::linear_in_y(params(100.0, 1.0), 100.0);
    const auto ens = simulate_brownian(TimeGrid(1.0, 4), 200, 1, 59);
    TerminalSpec term;
    term.kind = TerminalKind::Constant;
    CHECK_THROWS_AS(solve_backward_lsmc(stiff, term, ens, RegressionBasis{}, PicardConfig{}),
                    PicardError);
  }

  SUBCASE("z clipping is counted, final z unclipped") {
    const auto ens = simulate_brownian(TimeGrid(1.0, 16), 4000, 1, 61);
    const auto driver = DriverSpec::pure_quadratic(params(0.0, 1.0));
    PicardConfig tight;
    tight.z_clip = 1e-3;
    const auto sol =
        solve_backward_lsmc(driver, brownian_terminal_spec(), ens, RegressionBasis{}, tight);
    CHECK(sol.diag.clip_events > 0);
    double zmax = 0.0;
    for (int m = 0; m < ens.paths; ++m) zmax = std::max(zmax, std::abs(sol.z(8, m)));
    CHECK(zmax > 1e-3);  // reported Z is the regression value, not the clip
  }
}

TEST_CASE("determinism and regression subsampling") {
  const auto ens = simulate_brownian(TimeGrid(1.0, 32), 5000, 1, 67);
  const auto driver = DriverSpec::pure_quadratic(params(0.0, 1.0));
  const auto term = brownian_terminal_spec();

  const auto a = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
  const auto b = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{});
  CHECK(a.y0 == b.y0);

  SolveOptions sub;
  sub.subsample_fraction = 0.5;
  sub.regression_seed = 1;
  const auto c = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{}, sub);
  sub.regression_seed = 2;
  const auto d = solve_backward_lsmc(driver, term, ens, RegressionBasis{}, PicardConfig{}, sub);
  CHECK(c.y0 != a.y0);
  CHECK(c.y0 != d.y0);
  CHECK(std::abs(c.y0 - a.y0) < 0.05);
}

TEST_CASE("per-path summaries match stored fields") {
  const auto ens = simulate_brownian(TimeGrid(1.0, 16), 1000, 1, 71);
  const auto driver = DriverSpec::pure_quadratic(params(0.0, 1.0));
  const auto sol =
      solve_backward_lsmc(driver, brownian_terminal_spec(), ens, RegressionBasis{}, PicardConfig{});
  for (int m = 0; m < 50; ++m) {
    double sup = 0.0, zint = 0.0;
    for (int i = 0; i <= 16; ++i) sup = std::max(sup, std::abs(sol.y(i, m)));
    for (int i = 0; i < 16; ++i) zint += sol.z(i, m) * sol.z(i, m) * ens.grid.dt();
    CHECK(sol.sup_abs_y[static_cast<std::size_t>(m)] == doctest::Approx(sup));
    CHECK(sol.z_sq_integral[static_cast<std::size_t>(m)] == doctest::Approx(zint));
  }

  SolveOptions slim;
  slim.store_fields = false;
  const auto lean = solve_backward_lsmc(driver, brownian_terminal_spec(), ens,
                                        RegressionBasis{}, PicardConfig{}, slim);
  CHECK_FALSE(lean.has_fields());
  CHECK(lean.y0 == sol.y0);
}
