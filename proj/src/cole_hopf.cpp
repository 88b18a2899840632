#include "qbsde/cole_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbsde {

namespace {

// Exponents are validated against the representable range up front; the
// shifted weights exp(gamma xi - s0) then live in (0, 1].
double max_exponent(double gamma, std::span<const double> xi) {
  double s0 = -kInf;
  for (double x : xi) {
    const double e = gamma * x;
    if (!std::isfinite(e))
      throw OverflowError("cole-hopf: gamma * xi is not finite");
    s0 = std::max(s0, e);
  }
  return s0;
}

}  // namespace

BsdeSolution cole_hopf_solve(double gamma, const AlphaProcess& alpha,
                             std::vector<double> terminal, const PathEnsemble& ens,
                             const RegressionBasis& basis, const SolveOptions& options) {
  if (!(gamma > 0.0)) throw std::invalid_argument("cole-hopf: gamma > 0 required");
  const int paths = ens.paths;
  const int n = ens.grid.steps;
  const int d = ens.dim;
  const double dt = ens.grid.dt();
  if (static_cast<int>(terminal.size()) != paths)
    throw std::invalid_argument("cole-hopf: terminal sample count mismatch");
  const int start = ens.start_time > 0.0 ? ens.grid.index_of(ens.start_time) : 0;

  BsdeSolution sol;
  sol.grid = ens.grid;
  sol.paths = paths;
  sol.dim = d;
  sol.start_index = start;
  sol.sup_abs_y.assign(static_cast<std::size_t>(paths), 0.0);
  sol.z_sq_integral.assign(static_cast<std::size_t>(paths), 0.0);
  if (options.store_fields) {
    sol.y_fields.assign(static_cast<std::size_t>(n + 1) * paths, 0.0);
    sol.z_fields.assign(static_cast<std::size_t>(n) * paths * d, 0.0);
  }

  // The regression targets are exponentials; a cubic leaves visible bias in
  // the bulk of the distribution, so the oracle floors its fit degree at 5.
  RegressionBasis oracle_basis = basis;
  oracle_basis.degree = std::max(basis.degree, 5);

  const std::size_t np = static_cast<std::size_t>(paths);
  const double s0 = max_exponent(gamma, terminal);
  std::vector<double> w(np);  // exp(gamma xi - s0) per path
  double wmin = kInf, wmax = -kInf;
  for (std::size_t m = 0; m < np; ++m) {
    w[m] = std::exp(gamma * terminal[m] - s0);
    wmin = std::min(wmin, w[m]);
    wmax = std::max(wmax, w[m]);
  }

  std::vector<double> bcur(np), xreg(np), p(np), ztarget(np);
  for (int m = 0; m < paths; ++m) {
    double b = 0.0;
    for (int i = 0; i < n; ++i) b += ens.increment(m, i, 0);
    bcur[static_cast<std::size_t>(m)] = b;
    sol.sup_abs_y[static_cast<std::size_t>(m)] = std::abs(terminal[static_cast<std::size_t>(m)]);
  }
  if (options.store_fields)
    std::copy(terminal.begin(), terminal.end(),
              sol.y_fields.begin() + static_cast<std::size_t>(n) * paths);

  double y_at_start = 0.0;
  for (int i = n - 1; i >= start; --i) {
    const double t = ens.grid.node(i);
    const double tail = alpha.integral(t, ens.grid.horizon);
    for (int m = 0; m < paths; ++m)
      bcur[static_cast<std::size_t>(m)] -= ens.increment(m, i, 0);

    if (i == start) {
      const double p0 = mean(w);
      for (int k = 0; k < d; ++k) {
        for (std::size_t m = 0; m < np; ++m)
          ztarget[m] = (w[m] - p0) * ens.increment(static_cast<int>(m), i, k) / dt;
        const double zk = mean(ztarget) / (gamma * p0);
        if (options.store_fields)
          for (int m = 0; m < paths; ++m)
            sol.z_fields[(static_cast<std::size_t>(i) * paths + m) * d + k] = zk;
        for (std::size_t m = 0; m < np; ++m) sol.z_sq_integral[m] += zk * zk * dt;
      }
      y_at_start = (std::log(p0) + s0) / gamma + tail;
      for (std::size_t m = 0; m < np; ++m)
        sol.sup_abs_y[m] = std::max(sol.sup_abs_y[m], std::abs(y_at_start));
      if (options.store_fields)
        std::fill(sol.y_fields.begin() + static_cast<std::size_t>(i) * paths,
                  sol.y_fields.begin() + static_cast<std::size_t>(i + 1) * paths, y_at_start);
      break;
    }

    for (int m = 0; m < paths; ++m)
      xreg[static_cast<std::size_t>(m)] = basis.kind == BasisKind::StatePoly
                                              ? ens.state(m, i)
                                              : bcur[static_cast<std::size_t>(m)];
    const PolyDesign design(xreg, oracle_basis, std::span<const std::uint8_t>());
    const PolyFit pfit = design.fit(w);
    for (std::size_t m = 0; m < np; ++m) {
      // Conditional expectations of a positive variable stay inside the
      // observed range; clamping tames polynomial tails.
      p[m] = std::clamp(pfit(xreg[m]), wmin, wmax);
    }
    const double ti_tail = tail;
    for (std::size_t m = 0; m < np; ++m) {
      const double y = (std::log(p[m]) + s0) / gamma + ti_tail;
      sol.sup_abs_y[m] = std::max(sol.sup_abs_y[m], std::abs(y));
      if (options.store_fields)
        sol.y_fields[static_cast<std::size_t>(i) * paths + m] = y;
    }
    for (int k = 0; k < d; ++k) {
      for (std::size_t m = 0; m < np; ++m)
        ztarget[m] = (w[m] - p[m]) * ens.increment(static_cast<int>(m), i, k) / dt;
      const PolyFit qfit = design.fit(ztarget);
      for (std::size_t m = 0; m < np; ++m) {
        const double zk = qfit(xreg[m]) / (gamma * p[m]);
        sol.z_sq_integral[m] += zk * zk * dt;
        if (options.store_fields)
          sol.z_fields[(static_cast<std::size_t>(i) * paths + m) * d + k] = zk;
      }
    }
  }

  if (start == n) y_at_start = mean(terminal);
  sol.y0 = y_at_start;
  if (options.store_fields)
    for (int i = 0; i < start; ++i)
      std::fill(sol.y_fields.begin() + static_cast<std::size_t>(i) * paths,
                sol.y_fields.begin() + static_cast<std::size_t>(i + 1) * paths, sol.y0);
  return sol;
}

MeanCi cole_hopf_y0_ci(double gamma, const AlphaProcess& alpha,
                       std::span<const double> terminal, const PathEnsemble& ens,
                       int resamples) {
  if (!(gamma > 0.0)) throw std::invalid_argument("cole-hopf: gamma > 0 required");
  std::vector<double> exponents(terminal.size());
  for (std::size_t m = 0; m < terminal.size(); ++m) {
    const double e = gamma * terminal[m];
    if (!std::isfinite(e)) throw OverflowError("cole-hopf: gamma * xi is not finite");
    exponents[m] = e;
  }
  const double t0 = ens.start_time;
  const double tail = alpha.integral(t0, ens.grid.horizon);
  MeanCi ci = bootstrap_log_mean_exp(exponents, resamples, ens.seed);
  ci.value = ci.value / gamma + tail;
  ci.se /= gamma;
  ci.lo = ci.lo / gamma + tail;
  ci.hi = ci.hi / gamma + tail;
  return ci;
}

}  // namespace qbsde
