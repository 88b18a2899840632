// Euler-Maruyama forward simulation (scalar state) and exponential-moment
// estimation of sup_t exp(lambda |X_t|^p).

#ifndef QBSDE_SDE_HPP
#define QBSDE_SDE_HPP

#include <cstdint>
#include <functional>

#include "qbsde/ensemble.hpp"
#include "qbsde/math_util.hpp"

namespace qbsde {

struct SdeCoefficients {
  std::function<double(double, double)> drift;      // b(t, x)
  std::function<double(double, double)> diffusion;  // sigma(t, x)
  double lipschitz_beta = 0.0;  // certified Lipschitz constant of b, sigma
  double sigma_bound = 1.0;     // certified sup |sigma|
};

inline SdeCoefficients brownian_coefficients() {
  return {[](double, double) { return 0.0; }, [](double, double) { return 1.0; },
          0.0, 1.0};
}

struct SdeCertificate {
  double drift_origin_violation = 0.0;  // max(|b(t,0)| - beta, 0)
  double lipschitz_violation = 0.0;     // max ratio excess over beta (1 + tol)
  double sigma_bound_violation = 0.0;   // max(|sigma| - bound, 0)
  bool pass = false;
};

// Sampled check of the coefficient assumptions (Lipschitz b and sigma,
// |b(t,0)| <= beta, bounded sigma). Deterministic per seed.
SdeCertificate certify_sde(const SdeCoefficients& coeff, std::int64_t budget,
                           double tol, std::uint64_t seed);

// Fills ens.states with the Euler-Maruyama solution started at (t0, x0);
// X_t = x0 for t <= t0. t0 must be a grid node; requires dim == 1.
void simulate_sde(const SdeCoefficients& coeff, double t0, double x0,
                  PathEnsemble& ens);

struct ExpMomentEstimate {
  double log_estimate = 0.0;  // log E[sup_t exp(lambda |X_t|^p)]
  double estimate = 0.0;      // exp(log_estimate), +inf if unrepresentable
  double se_log = 0.0;        // bootstrap SE of log_estimate
  double ci_lo = 0.0, ci_hi = 0.0;  // bootstrap CI of log_estimate
  double fitted_c = 0.0;      // minimal C with estimate = C exp(lambda C |x0|^p)
  double lambda = 0.0, p = 1.0;
};

// Monte Carlo estimate of E[sup_t exp(lambda |X_t|^p)], 1 <= p < 2.
// Computed in log space; throws OverflowError if any per-path exponent
// leaves the representable range ("moment appears infinite").
ExpMomentEstimate estimate_exp_moment(const PathEnsemble& ens, double lambda,
                                      double p);

}  // namespace qbsde

#endif
