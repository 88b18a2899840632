#include "qbsde/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbsde {

double characteristic_flow(const AlphaProcess& alpha, double beta, double t,
                           double x, double u) {
  if (u > t) throw std::invalid_argument("characteristic_flow: u <= t required");
  if (u < 0.0) throw std::invalid_argument("characteristic_flow: u >= 0 required");
  if (x < 0.0) throw std::invalid_argument("characteristic_flow: x >= 0 required");
  return x * std::exp(beta * (t - u)) + alpha.weighted_integral(u, t, beta);
}

double psi_linear(const AlphaProcess& alpha, double beta, double s, double t,
                  double x) {
  if (s > t) throw std::invalid_argument("psi_linear: s <= t required");
  return characteristic_flow(alpha, beta, t, x, s);
}

ThetaTransform::ThetaTransform(std::function<double(double)> rho, double alpha_bar,
                               double x_max, int resolution)
    : rho_(std::move(rho)), alpha_bar_(alpha_bar), x_max_(x_max),
      resolution_(std::max(resolution, 4)) {
  if (!(alpha_bar_ > 0.0))
    throw std::invalid_argument("ThetaTransform: alpha_bar > 0 required");
  if (rho_(0.0) != 0.0)
    throw std::invalid_argument("ThetaTransform: rho(0) = 0 required");
  // Geometric segment ends refined near 0; 1/h can be steep there.
  grid_.push_back(0.0);
  double g = x_max_ * 1e-12;
  while (g < x_max_) {
    grid_.push_back(g);
    g *= 4.0;
  }
  grid_.push_back(x_max_);
  cumulative_.assign(grid_.size(), 0.0);
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + segment_integral_impl(grid_[i - 1], grid_[i]);
  }
}

// Composite Simpson of 1 / (rho(u) + alpha_bar) over [a, b].
double ThetaTransform::segment_integral_impl(double a, double b) const {
  const int n = resolution_;  // even subinterval count
  const double h = (b - a) / (2 * n);
  auto f = [&](double u) { return 1.0 / (rho_(u) + alpha_bar_); };
  double s = f(a) + f(b);
  for (int j = 1; j < 2 * n; ++j) s += (j % 2 ? 4.0 : 2.0) * f(a + j * h);
  return s * h / 3.0;
}

double ThetaTransform::theta(double x) const {
  if (x < 0.0) throw std::invalid_argument("ThetaTransform: x >= 0 required");
  if (x > x_max_) throw std::invalid_argument("ThetaTransform: x beyond quadrature window");
  std::size_t i = 0;
  while (i + 1 < grid_.size() && grid_[i + 1] <= x) ++i;
  return cumulative_[i] + segment_integral_impl(grid_[i], x);
}

double ThetaTransform::theta_inverse(double target) const {
  if (target < 0.0) throw std::invalid_argument("ThetaTransform: target >= 0 required");
  if (target > cumulative_.back())
    throw OverflowError("Theta range exhausted: integral of 1/h diverges too slowly "
                        "for the requested horizon");
  double lo = 0.0, hi = x_max_;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (theta(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ThetaTransform::psi(double s, double t, double x) const {
  if (s > t) throw std::invalid_argument("ThetaTransform: s <= t required");
  return theta_inverse((t - s) + theta(x));
}

AprioriBound apriori_bound(const AssumptionParams& params,
                           std::span<const double> terminal_samples,
                           std::uint64_t seed) {
  params.validate();
  if (terminal_samples.empty())
    throw std::invalid_argument("apriori_bound: terminal samples required");
  const double gamma = params.gamma;
  const double shift =
      gamma * params.alpha.weighted_integral(0.0, params.horizon, params.beta);
  const double scale = gamma * std::exp(params.beta * params.horizon);

  std::vector<double> exponents(terminal_samples.size());
  for (std::size_t m = 0; m < terminal_samples.size(); ++m) {
    const double e = scale * std::abs(terminal_samples[m]) + shift;
    if (!(e <= log_double_max()) || !std::isfinite(e))
      throw OverflowError("exponential moment of order gamma e^{beta T} overflows "
                          "at this gamma");
    exponents[m] = e;
  }
  const MeanCi ci = bootstrap_log_mean_exp(exponents, 200, seed);
  AprioriBound out;
  out.value = ci.value / gamma;
  out.se = ci.se / gamma;
  out.ci_lo = ci.lo / gamma;
  out.ci_hi = ci.hi / gamma;
  out.deterministic_shift = shift;
  out.seed = seed;
  return out;
}

}  // namespace qbsde
