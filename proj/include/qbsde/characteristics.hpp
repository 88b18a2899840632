// Characteristics machinery for the transport equation psi_t = h psi_x:
// the flow v(u; t, x), the linear-case psi, the general Theta-transform
// psi = Theta^{-1}(t - s + Theta(x)), and the terminal-time a priori bound
// (1/gamma) log E exp(gamma e^{beta T} |xi| + gamma int_0^T alpha e^{beta r} dr).

#ifndef QBSDE_CHARACTERISTICS_HPP
#define QBSDE_CHARACTERISTICS_HPP

#include <cstdint>
#include <functional>
#include <span>

#include "qbsde/alpha_process.hpp"
#include "qbsde/driver.hpp"
#include "qbsde/math_util.hpp"

namespace qbsde {

// v(u; t, x) = x e^{beta (t-u)} + int_u^t alpha(r) e^{beta (r-u)} dr,
// the backward characteristic through (t, x); requires 0 <= u <= t, x >= 0.
double characteristic_flow(const AlphaProcess& alpha, double beta, double t,
                           double x, double u);

// psi(t, x) = v(s; t, x) for the linear h(t, x) = alpha(t) + beta x and
// terminal profile Psi(x) = x; requires s <= t, x >= 0.
double psi_linear(const AlphaProcess& alpha, double beta, double s, double t,
                  double x);

// General monotone transform for h(u) = rho(u) + alpha_bar with rho convex,
// C^1, rho(0) = 0: Theta(x) = int_0^x du / h(u), psi = Theta^{-1}(dt + Theta(x)).
class ThetaTransform {
public:
  // x_max bounds the quadrature window; resolution is the Simpson
  // subinterval count per geometric segment.
  ThetaTransform(std::function<double(double)> rho, double alpha_bar,
                 double x_max = 1e6, int resolution = 64);

  double theta(double x) const;
  // Theta^{-1} by bisection to 1e-10; throws OverflowError when the target
  // exceeds Theta(x_max) (the divergence condition fails numerically).
  double theta_inverse(double target) const;
  double psi(double s, double t, double x) const;

  double x_max() const { return x_max_; }

private:
  double segment_integral_impl(double a, double b) const;

  std::function<double(double)> rho_;
  double alpha_bar_;
  double x_max_;
  int resolution_;
  std::vector<double> grid_;        // geometric nodes, refined near 0
  std::vector<double> cumulative_;  // Theta at grid nodes
};

struct AprioriBound {
  double value = 0.0;      // the bound (1/gamma) log E[...]
  double se = 0.0;         // bootstrap SE (percentile method, 200 resamples)
  double ci_lo = 0.0, ci_hi = 0.0;
  double deterministic_shift = 0.0;  // the alpha integral term inside the exp
  std::uint64_t seed = 0;
};

// Monte Carlo evaluation of the a priori estimate at t = 0. Throws
// OverflowError when some exponent gamma e^{beta T} |xi| leaves the
// representable range (the required exponential moment fails at this gamma).
AprioriBound apriori_bound(const AssumptionParams& params,
                           std::span<const double> terminal_samples,
                           std::uint64_t seed);

}  // namespace qbsde

#endif
