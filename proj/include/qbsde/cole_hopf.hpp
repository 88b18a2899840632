// Exponential-transform oracle, exact for f(t, y, z) = alpha(t) + (gamma/2)|z|^2:
//   Y_t = (1/gamma) log E[exp(gamma xi) | F_t] + int_t^T alpha(s) ds,
//   Z_t = Q_t / (gamma P_t) with P the exponential martingale and dP = Q dB.
// P is estimated by regression of exp(gamma xi) (shifted into the
// representable range); at the start layer by the plain cross-path mean.

#ifndef QBSDE_COLE_HOPF_HPP
#define QBSDE_COLE_HOPF_HPP

#include "qbsde/alpha_process.hpp"
#include "qbsde/lsmc.hpp"

namespace qbsde {

BsdeSolution cole_hopf_solve(double gamma, const AlphaProcess& alpha,
                             std::vector<double> terminal, const PathEnsemble& ens,
                             const RegressionBasis& basis,
                             const SolveOptions& options = {});

// Start-layer value with a bootstrap confidence interval:
// (1/gamma) log-mean-exp(gamma xi) + |alpha|_1 over [t0, T].
MeanCi cole_hopf_y0_ci(double gamma, const AlphaProcess& alpha,
                       std::span<const double> terminal, const PathEnsemble& ens,
                       int resamples = 200);

}  // namespace qbsde

#endif
