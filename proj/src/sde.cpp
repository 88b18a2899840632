#include "qbsde/sde.hpp"

#include <cmath>
#include <stdexcept>

#include "qbsde/rng.hpp"

namespace qbsde {

SdeCertificate certify_sde(const SdeCoefficients& coeff, std::int64_t budget,
                           double tol, std::uint64_t seed) {
  const CounterRng rng(seed, RngStream::Certify);
  constexpr double kXRange = 20.0;
  SdeCertificate cert;
  double horizon = 1.0;
  for (std::int64_t s = 0; s < budget; ++s) {
    const auto c = static_cast<std::uint64_t>(s);
    const double t = horizon * rng.uniform(c, 10, 0);
    const double x = kXRange * (2.0 * rng.uniform(c, 11, 0) - 1.0);
    const double x2 = kXRange * (2.0 * rng.uniform(c, 12, 0) - 1.0);
    cert.drift_origin_violation = std::max(
        cert.drift_origin_violation, std::abs(coeff.drift(t, 0.0)) - coeff.lipschitz_beta);
    if (x != x2) {
      const double ratio = (std::abs(coeff.drift(t, x) - coeff.drift(t, x2)) +
                            std::abs(coeff.diffusion(t, x) - coeff.diffusion(t, x2))) /
                           std::abs(x - x2);
      cert.lipschitz_violation =
          std::max(cert.lipschitz_violation, ratio - coeff.lipschitz_beta * (1.0 + tol));
    }
    cert.sigma_bound_violation = std::max(cert.sigma_bound_violation,
                                          std::abs(coeff.diffusion(t, x)) - coeff.sigma_bound);
  }
  cert.drift_origin_violation = std::max(0.0, cert.drift_origin_violation);
  cert.lipschitz_violation = std::max(0.0, cert.lipschitz_violation);
  cert.sigma_bound_violation = std::max(0.0, cert.sigma_bound_violation);
  cert.pass = cert.drift_origin_violation <= tol && cert.lipschitz_violation <= tol &&
              cert.sigma_bound_violation <= tol;
  return cert;
}

void simulate_sde(const SdeCoefficients& coeff, double t0, double x0,
                  PathEnsemble& ens) {
  if (ens.increments.empty())
    throw std::invalid_argument("simulate_sde: ensemble has no increments");
  if (ens.dim != 1)
    throw std::invalid_argument("simulate_sde: scalar state needs dim == 1");
  const int i0 = ens.grid.index_of(t0);  // throws if t0 is off-grid
  const int n = ens.grid.steps;
  const double dt = ens.grid.dt();
  ens.start_time = t0;
  ens.start_state = x0;
  ens.states.assign(static_cast<std::size_t>(ens.paths) * (n + 1), x0);
  for (int m = 0; m < ens.paths; ++m) {
    double x = x0;
    for (int i = i0; i < n; ++i) {
      const double t = ens.grid.node(i);
      x += coeff.drift(t, x) * dt + coeff.diffusion(t, x) * ens.increment(m, i, 0);
      ens.states[static_cast<std::size_t>(m) * (n + 1) + i + 1] = x;
    }
  }
}

ExpMomentEstimate estimate_exp_moment(const PathEnsemble& ens, double lambda,
                                      double p) {
  if (!(p >= 1.0 && p < 2.0))
    throw std::invalid_argument("estimate_exp_moment: exponent p in [1, 2) violated");
  if (!ens.has_states())
    throw std::invalid_argument("estimate_exp_moment: states not filled");
  const int n = ens.grid.steps;
  std::vector<double> exponents(static_cast<std::size_t>(ens.paths));
  for (int m = 0; m < ens.paths; ++m) {
    double sup = 0.0;
    for (int i = 0; i <= n; ++i) sup = std::max(sup, std::abs(ens.state(m, i)));
    const double e = lambda * std::pow(sup, p);
    if (!(e <= log_double_max()) || !std::isfinite(e))
      throw OverflowError("exponential moment appears infinite at this lambda, p");
    exponents[static_cast<std::size_t>(m)] = e;
  }
  const MeanCi ci = bootstrap_log_mean_exp(exponents, 200, ens.seed);
  ExpMomentEstimate out;
  out.log_estimate = ci.value;
  out.estimate = ci.value < log_double_max() ? std::exp(ci.value) : kInf;
  out.se_log = ci.se;
  out.ci_lo = ci.lo;
  out.ci_hi = ci.hi;
  out.lambda = lambda;
  out.p = p;

  // Minimal C with C exp(lambda C |x0|^p) = estimate (bisection; the map is
  // increasing in C). For x0 = 0 this is just the estimate itself.
  const double xterm = lambda * std::pow(std::abs(ens.start_state), p);
  if (xterm == 0.0) {
    out.fitted_c = out.estimate;
  } else {
    double lo = 0.0, hi = 1.0;
    auto g = [&](double c) { return std::log(c) + xterm * c - out.log_estimate; };
    while (g(hi) < 0.0 && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    out.fitted_c = 0.5 * (lo + hi);
  }
  return out;
}

}  // namespace qbsde
