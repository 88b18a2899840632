#include "qbsde/theorem_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qbsde/rng.hpp"

namespace qbsde {

namespace {

void require_same_shape(const BsdeSolution& sol, const PathEnsemble& ens) {
  if (sol.paths != ens.paths || sol.grid.steps != ens.grid.steps)
    throw std::invalid_argument("experiment: solution / ensemble mismatch");
}

// Max of f - g over sampled (t, y, z) tuples (both drivers share d).
double sampled_order_gap(const DriverSpec& f, const DriverSpec& g,
                         std::int64_t budget, std::uint64_t seed) {
  const CounterRng rng(seed, RngStream::Certify);
  const double horizon = std::min(f.params().horizon, g.params().horizon);
  std::vector<double> z(static_cast<std::size_t>(f.dim()));
  double worst = -kInf;
  for (std::int64_t s = 0; s < budget; ++s) {
    const auto c = static_cast<std::uint64_t>(s);
    const double t = horizon * rng.uniform(c, 20, 0);
    const double y = 10.0 * (2.0 * rng.uniform(c, 21, 0) - 1.0);
    for (int k = 0; k < f.dim(); ++k)
      z[static_cast<std::size_t>(k)] =
          10.0 * (2.0 * rng.uniform(c, 22, static_cast<std::uint64_t>(k)) - 1.0);
    worst = std::max(worst, f.eval(t, y, z) - g.eval(t, y, z));
  }
  return worst;
}

double sampled_min_value(const DriverSpec& f, std::int64_t budget, std::uint64_t seed) {
  const CounterRng rng(seed, RngStream::Certify);
  std::vector<double> z(static_cast<std::size_t>(f.dim()));
  double worst = kInf;
  for (std::int64_t s = 0; s < budget; ++s) {
    const auto c = static_cast<std::uint64_t>(s);
    const double t = f.params().horizon * rng.uniform(c, 30, 0);
    const double y = 10.0 * (2.0 * rng.uniform(c, 31, 0) - 1.0);
    for (int k = 0; k < f.dim(); ++k)
      z[static_cast<std::size_t>(k)] =
          10.0 * (2.0 * rng.uniform(c, 32, static_cast<std::uint64_t>(k)) - 1.0);
    worst = std::min(worst, f.eval(t, y, z));
  }
  return worst;
}

double checked_exponent(double e, const std::string& context) {
  if (!(e <= log_double_max()) || std::isnan(e)) throw OverflowError(context);
  return e;
}

}  // namespace

NoiseFloor solver_noise_floor(const BsdeProblem& problem, const PathEnsemble& ens,
                              const RegressionBasis& basis, const PicardConfig& picard,
                              const NoiseFloorOptions& options, bool track_cells) {
  NoiseFloor floor;
  std::vector<double> prev;
  for (int r = 0; r < options.resolves; ++r) {
    SolveOptions opt;
    opt.store_fields = track_cells;
    opt.subsample_fraction = options.subsample_fraction;
    opt.regression_seed = static_cast<std::uint64_t>(r + 1);
    const BsdeSolution sol =
        solve_backward_lsmc(problem.driver, problem.terminal, ens, basis, picard, opt);
    floor.y0_values.push_back(sol.y0);
    if (track_cells) {
      if (!prev.empty()) {
        for (std::size_t c = 0; c < prev.size(); ++c)
          floor.cell_max = std::max(floor.cell_max, std::abs(prev[c] - sol.y_fields[c]));
      }
      prev = sol.y_fields;
    }
  }
  const auto [lo, hi] = std::minmax_element(floor.y0_values.begin(), floor.y0_values.end());
  floor.y0_range = *hi - *lo;
  return floor;
}

BoundCertificate check_apriori(const BsdeSolution& sol, const AssumptionParams& params,
                               std::span<const double> xi, const PathEnsemble& ens,
                               const RegressionBasis& basis,
                               const AprioriCheckOptions& options) {
  require_same_shape(sol, ens);
  if (static_cast<int>(xi.size()) != ens.paths)
    throw std::invalid_argument("check_apriori: terminal sample count mismatch");

  const AprioriBound bound = apriori_bound(params, xi, ens.seed);
  BoundCertificate cert;
  cert.label = "apriori";
  cert.statistic = std::abs(sol.y0);
  cert.bound = bound.value;
  cert.se = bound.se;
  cert.ci_lo = bound.ci_lo;
  cert.ci_hi = bound.ci_hi;
  cert.seed = ens.seed;
  const bool t0_pass = cert.statistic <= cert.bound + 3.0 * cert.se;

  // Interior layers: pathwise |Y_i| against the regression estimate of the
  // conditional bound. Both sides carry regression error; violations count
  // only beyond a relative slack, and a small cell budget is tolerated.
  double violations = 0.0, cells = 0.0;
  if (sol.has_fields()) {
    const int n = ens.grid.steps;
    const double gamma = params.gamma;
    const std::size_t np = static_cast<std::size_t>(ens.paths);
    std::vector<double> bcur(np, 0.0), xreg(np), w(np);
    int reached = 0;
    for (int i = 1; i < n; i += options.layer_stride) {
      for (std::size_t m = 0; m < np; ++m)
        for (int j = reached; j < i; ++j)
          bcur[m] += ens.increment(static_cast<int>(m), j, 0);
      reached = i;
      const double t = ens.grid.node(i);
      const double scale = gamma * std::exp(params.beta * (params.horizon - t));
      const double tail = params.alpha.weighted_integral(t, params.horizon, params.beta);
      double s0 = -kInf;
      for (std::size_t m = 0; m < np; ++m)
        s0 = std::max(s0, checked_exponent(scale * std::abs(xi[m]),
                                           "apriori: exponential moment overflow"));
      double wmin = kInf, wmax = -kInf;
      for (std::size_t m = 0; m < np; ++m) {
        w[m] = std::exp(scale * std::abs(xi[m]) - s0);
        wmin = std::min(wmin, w[m]);
        wmax = std::max(wmax, w[m]);
      }
      for (std::size_t m = 0; m < np; ++m)
        xreg[m] = basis.kind == BasisKind::StatePoly ? ens.state(static_cast<int>(m), i)
                                                     : bcur[m];
      const PolyDesign design(xreg, basis);
      const PolyFit fit = design.fit(w);
      for (std::size_t m = 0; m < np; ++m) {
        const double p = std::clamp(fit(xreg[m]), wmin, wmax);
        const double cond_bound = (std::log(p) + s0) / gamma + tail;
        const double slack = options.interior_slack * (1.0 + std::abs(cond_bound));
        cells += 1.0;
        if (std::abs(sol.y(i, static_cast<int>(m))) > cond_bound + slack)
          violations += 1.0;
      }
    }
  }
  const double fraction = cells > 0 ? violations / cells : 0.0;
  cert.note = "interior violation fraction " + std::to_string(fraction);
  cert.pass = t0_pass && fraction <= options.violation_budget;
  return cert;
}

BoundCertificate theta_gap_certificate(const BsdeSolution& sol,
                                       const BsdeSolution& sol_prime,
                                       const DriverSpec& f, const DriverSpec& f_prime,
                                       std::span<const double> xi,
                                       std::span<const double> xi_prime,
                                       const PathEnsemble& ens, double theta,
                                       double t) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("theta certificate: theta in (0, 1) required");
  require_same_shape(sol, ens);
  require_same_shape(sol_prime, ens);
  if (!sol_prime.has_fields())
    throw std::invalid_argument("theta certificate: primed solution needs stored fields");

  const int it = ens.grid.index_of(t);
  const int n = ens.grid.steps;
  const double dt = ens.grid.dt();
  const std::size_t np = static_cast<std::size_t>(ens.paths);
  const AssumptionParams& pars = f.params();
  const double gamma = pars.gamma;
  const double beta = pars.beta;
  const double ebt = std::exp(beta * pars.horizon);
  const std::string overflow_msg =
      "theta certificate overflow at theta = " + std::to_string(theta);

  // Right-hand exponent per path: the theta-weighted data gap plus the
  // gamma e^{2 beta T} (|xi| + int (alpha + 2 beta |Y'|)) budget.
  std::vector<double> rhs_exponent(np);
  std::vector<double> zrow(static_cast<std::size_t>(ens.dim));
  double max_dxi = -kInf, max_df = -kInf;
  for (std::size_t m = 0; m < np; ++m) {
    const double dxi = xi[m] - xi_prime[m];
    max_dxi = std::max(max_dxi, dxi);
    double idf = 0.0;
    double iay = 0.0;
    for (int i = it; i < n; ++i) {
      for (int k = 0; k < ens.dim; ++k)
        zrow[static_cast<std::size_t>(k)] = sol_prime.z(i, static_cast<int>(m), k);
      const double ti = ens.grid.node(i);
      const double yp = sol_prime.y(i, static_cast<int>(m));
      const double df = f.eval(ti, yp, zrow) - f_prime.eval(ti, yp, zrow);
      max_df = std::max(max_df, df);
      idf += dt * df;
      iay += dt * 2.0 * beta * std::abs(yp);
    }
    iay += pars.alpha.integral(ens.grid.node(it), pars.horizon);
    const double e = gamma * theta / (1.0 - theta) * (dxi + idf) +
                     gamma * ebt * ebt * (std::abs(xi[m]) + iay);
    rhs_exponent[m] = checked_exponent(e, overflow_msg);
  }
  if (max_dxi > 1e-9 || max_df > 1e-9)
    throw std::invalid_argument(
        "theta certificate: delta xi / delta f not certified nonpositive");

  BoundCertificate cert;
  cert.label = "theta-gap";
  cert.theta_or_n = theta;
  cert.seed = ens.seed;

  if (it == 0) {
    const MeanCi rhs = bootstrap_log_mean_exp(rhs_exponent, 200, ens.seed);
    const double lhs = checked_exponent(
        gamma * ebt * (sol.y0 - theta * sol_prime.y0) / (1.0 - theta), overflow_msg);
    cert.statistic = lhs;
    cert.bound = rhs.value;
    cert.se = rhs.se;
    cert.ci_lo = rhs.lo;
    cert.ci_hi = rhs.hi;
    cert.pass = lhs <= rhs.value + 3.0 * rhs.se;
    cert.note = "log-scale comparison at t = 0";
    return cert;
  }

  // Interior node: pathwise left side with the envelope A_t in [-beta t,
  // beta t] (the conservative end per cell) against a regression estimate
  // of the right side.
  if (!sol.has_fields())
    throw std::invalid_argument("theta certificate: solution needs stored fields");
  double s0 = -kInf;
  for (std::size_t m = 0; m < np; ++m) s0 = std::max(s0, rhs_exponent[m]);
  std::vector<double> w(np), xreg(np);
  double wmin = kInf, wmax = -kInf;
  for (std::size_t m = 0; m < np; ++m) {
    w[m] = std::exp(rhs_exponent[m] - s0);
    wmin = std::min(wmin, w[m]);
    wmax = std::max(wmax, w[m]);
  }
  for (std::size_t m = 0; m < np; ++m) {
    double b = 0.0;
    for (int i = 0; i < it; ++i) b += ens.increment(static_cast<int>(m), i, 0);
    xreg[m] = ens.has_states() ? ens.state(static_cast<int>(m), it) : b;
  }
  const RegressionBasis interior_basis;
  const PolyDesign design(xreg, interior_basis);
  const PolyFit fit = design.fit(w);
  double violations = 0.0, worst = -kInf;
  for (std::size_t m = 0; m < np; ++m) {
    const double u =
        sol.y(it, static_cast<int>(m)) - theta * sol_prime.y(it, static_cast<int>(m));
    const double envelope = u > 0 ? beta * t : -beta * t;
    const double lhs = checked_exponent(
        gamma * std::exp(beta * pars.horizon + envelope) * u / (1.0 - theta),
        overflow_msg);
    const double rhs_log = std::log(std::clamp(fit(xreg[m]), wmin, wmax)) + s0;
    const double slack = 0.05 * (1.0 + std::abs(rhs_log));
    worst = std::max(worst, lhs - rhs_log);
    if (lhs > rhs_log + slack) violations += 1.0;
  }
  cert.statistic = worst;
  cert.bound = 0.0;
  cert.pass = violations / static_cast<double>(np) <= 1e-3;
  cert.note = "interior pathwise check, violation fraction " +
              std::to_string(violations / static_cast<double>(np));
  return cert;
}

ComparisonReport run_comparison_experiment(const BsdeProblem& problem,
                                           const BsdeProblem& problem_prime,
                                           const PathEnsemble& ens,
                                           const RegressionBasis& basis,
                                           const PicardConfig& picard,
                                           const ComparisonOptions& options) {
  // Preconditions: orderings on sampled points / paths, H-comp for f via
  // the solver's own certificate.
  const double order_gap = sampled_order_gap(problem.driver, problem_prime.driver,
                                             options.certify_budget, ens.seed);
  if (order_gap > options.order_tol)
    throw std::invalid_argument("comparison: sampled f <= f' fails (gap " +
                                std::to_string(order_gap) + ")");
  const std::vector<double> xi = terminal_samples(problem.terminal, ens);
  const std::vector<double> xi_prime = terminal_samples(problem_prime.terminal, ens);
  for (std::size_t m = 0; m < xi.size(); ++m)
    if (xi[m] > xi_prime[m] + options.order_tol)
      throw std::invalid_argument("comparison: pathwise xi <= xi' fails");

  const BsdeSolution sol =
      solve_backward_lsmc(problem.driver, problem.terminal, ens, basis, picard);
  const BsdeSolution sol_prime = solve_backward_lsmc(
      problem_prime.driver, problem_prime.terminal, ens, basis, picard);

  ComparisonReport report;
  report.order_pass = true;
  double tol = options.cell_tolerance;
  if (tol <= 0.0) {
    const NoiseFloor floor =
        solver_noise_floor(problem, ens, basis, picard, options.noise, true);
    report.noise_cell_floor = floor.cell_max;
    tol = 3.0 * floor.cell_max;
  }
  report.tolerance = tol;

  const int n = ens.grid.steps;
  double cells = 0.0, violations = 0.0, max_gap = -kInf;
  for (int i = sol.start_index; i <= n; ++i) {
    for (int m = 0; m < ens.paths; ++m) {
      const double gap = sol.y(i, m) - sol_prime.y(i, m);
      max_gap = std::max(max_gap, gap);
      cells += 1.0;
      if (gap > tol) violations += 1.0;
    }
  }
  report.max_gap = max_gap;
  report.violation_fraction = violations / cells;

  bool thetas_pass = true;
  for (double theta : options.theta_list) {
    BoundCertificate cert;
    try {
      cert = theta_gap_certificate(sol, sol_prime, problem.driver, problem_prime.driver,
                                   xi, xi_prime, ens, theta, 0.0);
    } catch (const OverflowError& e) {
      cert.label = "theta-gap";
      cert.theta_or_n = theta;
      cert.overflow = true;
      cert.pass = false;
      cert.note = e.what();
    }
    thetas_pass = thetas_pass && cert.pass;
    report.theta_certs.push_back(std::move(cert));
  }
  report.pass = report.violation_fraction == 0.0 && thetas_pass;
  return report;
}

PairErrorStats solution_error_stats(const BsdeSolution& a, const BsdeSolution& b,
                                    double p) {
  if (a.paths != b.paths || a.grid.steps != b.grid.steps || a.dim != b.dim)
    throw std::invalid_argument("error stats: solution shape mismatch");
  if (!a.has_fields() || !b.has_fields())
    throw std::invalid_argument("error stats: both solutions need stored fields");
  const int n = a.grid.steps;
  const double dt = a.grid.dt();
  const std::size_t np = static_cast<std::size_t>(a.paths);
  std::vector<double> e_exp(np), z_term(np);
  for (std::size_t m = 0; m < np; ++m) {
    double sup = 0.0;
    for (int i = a.start_index; i <= n; ++i)
      sup = std::max(sup,
                     std::abs(a.y(i, static_cast<int>(m)) - b.y(i, static_cast<int>(m))));
    e_exp[m] = checked_exponent(p * sup, "error stats: exponent overflow");
    double zint = 0.0;
    for (int i = a.start_index; i < n; ++i) {
      double d2 = 0.0;
      for (int k = 0; k < a.dim; ++k) {
        const double d = a.z(i, static_cast<int>(m), k) - b.z(i, static_cast<int>(m), k);
        d2 += d * d;
      }
      zint += d2 * dt;
    }
    z_term[m] = std::pow(zint, 0.5 * p);
  }
  PairErrorStats stats;
  stats.e = std::expm1(log_mean_exp(e_exp));
  stats.z = mean(z_term);
  return stats;
}

StabilityReport run_stability_experiment(const BsdeProblem& target,
                                         const SequenceBuilder& builder,
                                         std::span<const double> n_list,
                                         const PathEnsemble& ens,
                                         const RegressionBasis& basis,
                                         const PicardConfig& picard,
                                         const StabilityOptions& options) {
  StabilityReport report;
  report.p_list.assign(options.p_list.begin(), options.p_list.end());

  const BsdeSolution ref =
      solve_backward_lsmc(target.driver, target.terminal, ens, basis, picard);
  const std::vector<double> xi = terminal_samples(target.terminal, ens);
  {
    const double mass =
        target.driver.params().alpha.total_mass(target.driver.params().horizon);
    std::vector<double> conv(xi.size());
    for (std::size_t m = 0; m < xi.size(); ++m)
      conv[m] = checked_exponent(options.conv_lambda * (std::abs(xi[m]) + mass),
                                 "stability: uniform exponential moment diverges");
    report.target_conv_moment_log = log_mean_exp(conv);
  }

  const AssumptionParams& tp = target.driver.params();
  for (double nval : n_list) {
    const BsdeProblem pert = builder(nval);
    if (pert.driver.params().beta != tp.beta || pert.driver.params().gamma != tp.gamma)
      throw std::invalid_argument("stability: sequence must share (beta, gamma)");
    const BsdeSolution sol =
        solve_backward_lsmc(pert.driver, pert.terminal, ens, basis, picard);
    StabilityEntry entry;
    entry.n = nval;
    for (double p : options.p_list) {
      const PairErrorStats stats = solution_error_stats(sol, ref, p);
      entry.e_p.push_back(stats.e);
      entry.z_p.push_back(stats.z);
    }
    const std::vector<double> xin = terminal_samples(pert.terminal, ens);
    const double mass =
        pert.driver.params().alpha.total_mass(pert.driver.params().horizon);
    std::vector<double> conv(xin.size());
    for (std::size_t m = 0; m < xin.size(); ++m)
      conv[m] = checked_exponent(options.conv_lambda * (std::abs(xin[m]) + mass),
                                 "stability: uniform exponential moment diverges");
    entry.conv_moment_log = log_mean_exp(conv);
    report.entries.push_back(std::move(entry));
  }

  report.e_monotone = report.z_monotone = true;
  for (std::size_t p = 0; p < options.p_list.size(); ++p) {
    for (std::size_t k = 1; k < report.entries.size(); ++k) {
      if (!(report.entries[k].e_p[p] < report.entries[k - 1].e_p[p]))
        report.e_monotone = false;
      if (!(report.entries[k].z_p[p] < report.entries[k - 1].z_p[p]))
        report.z_monotone = false;
    }
  }
  report.pass = report.e_monotone && report.z_monotone;
  return report;
}

MonotoneReport run_monotone_approximation(const BsdeProblem& problem,
                                          std::span<const double> n_list,
                                          const PathEnsemble& ens,
                                          const RegressionBasis& basis,
                                          const PicardConfig& picard,
                                          const MonotoneOptions& options) {
  const std::vector<double> xi = terminal_samples(problem.terminal, ens);
  for (double x : xi)
    if (x < 0.0) throw std::invalid_argument("monotone approximation: xi >= 0 required");
  if (sampled_min_value(problem.driver, options.certify_budget, ens.seed) < -1e-9)
    throw std::invalid_argument(
        "monotone approximation: f >= 0 on sampled points required");

  MonotoneReport report;
  const BsdeSolution full =
      solve_backward_lsmc(problem.driver, problem.terminal, ens, basis, picard);
  report.y0_untruncated = full.y0;

  double last_finite_y0 = full.y0;
  for (double n : n_list) {
    const BsdeProblem cut =
        build_truncated_problem(problem.driver, problem.terminal, n, kInf);
    const BsdeSolution sol =
        solve_backward_lsmc(cut.driver, cut.terminal, ens, basis, picard);
    report.n_values.push_back(n);
    report.y0.push_back(sol.y0);
    if (!std::isinf(n)) last_finite_y0 = sol.y0;
  }

  const NoiseFloor floor =
      solver_noise_floor(problem, ens, basis, picard, options.noise, false);
  report.noise_floor = floor.y0_range;

  report.nondecreasing = true;
  for (std::size_t k = 1; k < report.y0.size(); ++k)
    if (report.y0[k] < report.y0[k - 1] - report.noise_floor)
      report.nondecreasing = false;
  report.final_gap = std::abs(report.y0_untruncated - last_finite_y0);
  report.pass =
      report.nondecreasing && report.final_gap <= std::max(report.noise_floor, 1e-9);
  return report;
}

MomentRatio moment_ratio(const BsdeSolution& sol, double gamma, double p,
                         std::span<const double> xi, double alpha_mass) {
  if (!(p > 1.0)) throw std::invalid_argument("moment ratio: p > 1 required");
  const std::size_t np = sol.sup_abs_y.size();
  std::vector<double> sup_exp(np), z_pow(np), bound_exp(xi.size());
  for (std::size_t m = 0; m < np; ++m) {
    sup_exp[m] = checked_exponent(gamma * p * sol.sup_abs_y[m],
                                  "moment ratio: statistic overflow");
    z_pow[m] = std::pow(sol.z_sq_integral[m], 0.5 * p);
  }
  for (std::size_t m = 0; m < xi.size(); ++m)
    bound_exp[m] = checked_exponent(p * gamma * (std::abs(xi[m]) + alpha_mass),
                                    "moment ratio: bound side overflow");
  MomentRatio out;
  out.p = p;
  const double a = log_mean_exp(sup_exp);
  const double b = std::log(mean(z_pow));
  const double hi = std::max(a, b), lo = std::min(a, b);
  out.statistic_log = std::isfinite(lo) ? hi + std::log1p(std::exp(lo - hi)) : hi;
  out.bound_side_log = log_mean_exp(bound_exp);
  out.ratio = std::exp(out.statistic_log - out.bound_side_log);
  return out;
}

BsdeProblem random_certified_problem(std::uint64_t seed, std::uint64_t index,
                                     double horizon) {
  const CounterRng rng(seed, RngStream::ProblemGen);
  auto u = [&](std::uint64_t slot) { return rng.uniform(index, slot, 0); };

  AssumptionParams pars;
  pars.gamma = 0.5 + 1.5 * u(0);
  pars.beta = 0.5 * u(1);
  pars.horizon = horizon;
  if (u(2) < 0.5) pars.alpha = AlphaProcess::constant(0.5 * u(3));

  DriverSpec driver = [&]() {
    const double pick = u(4);
    const double slope = pars.beta * (2.0 * u(5) - 1.0);
    if (pick < 0.4) return DriverSpec::pure_quadratic(pars);
    if (pick < 0.7) return DriverSpec::linear_plus_quadratic(pars, slope);
    if (pick < 0.9) return DriverSpec::linear_in_y(pars, slope);
    return DriverSpec::zero(pars);
  }();

  TerminalSpec term;
  const double tpick = u(6);
  if (tpick < 0.35) {
    term.kind = TerminalKind::Brownian;
  } else if (tpick < 0.6) {
    term.kind = TerminalKind::BrownianAbs;
  } else if (tpick < 0.85) {
    term.kind = TerminalKind::Brownian;
    const double c = 1.0 + 2.0 * u(7);
    term.clip_pos = c;
    term.clip_neg = c;
  } else {
    term.kind = TerminalKind::Constant;
    term.constant = 2.0 * u(8) - 0.5;
  }
  return BsdeProblem{std::move(driver), term};
}

std::pair<BsdeProblem, BsdeProblem> random_ordered_pair(std::uint64_t seed,
                                                        std::uint64_t index,
                                                        double horizon) {
  const CounterRng rng(seed, RngStream::ProblemGen);
  auto u = [&](std::uint64_t slot) { return rng.uniform(index, 100 + slot, 0); };

  AssumptionParams pars;
  pars.gamma = 0.5 + 1.0 * u(0);
  pars.beta = 0.0;
  pars.horizon = horizon;
  if (u(2) < 0.5) pars.alpha = AlphaProcess::constant(0.4 * u(1));

  AssumptionParams pars_prime = pars;
  pars_prime.gamma = pars.gamma + 0.8 * u(3);  // gamma <= gamma'

  TerminalSpec term;
  const double tpick = u(4);
  if (tpick < 0.4) {
    term.kind = TerminalKind::Brownian;
  } else if (tpick < 0.7) {
    term.kind = TerminalKind::BrownianAbs;
  } else {
    term.kind = TerminalKind::Brownian;
    const double c = 1.0 + 1.5 * u(5);
    term.clip_pos = c;
    term.clip_neg = c;
  }
  TerminalSpec term_prime = term;
  term_prime.offset = term.offset + u(6);  // xi' = xi + |c|

  BsdeProblem lo{DriverSpec::pure_quadratic(pars), term};
  BsdeProblem hi{DriverSpec::pure_quadratic(pars_prime), term_prime};
  return {std::move(lo), std::move(hi)};
}

}  // namespace qbsde
