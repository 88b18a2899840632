#include "qbsde/driver.hpp"

#include <cmath>
#include <stdexcept>

#include "qbsde/rng.hpp"

namespace qbsde {

void AssumptionParams::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma > 0 violated");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta >= 0 violated");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon T > 0 violated");
  if (phi(0.0) != 0.0) throw std::invalid_argument("phi(0) = 0 violated");
}

std::string to_string(DriverFamily f) {
  switch (f) {
    case DriverFamily::Zero: return "zero";
    case DriverFamily::LinearInY: return "linear-in-y";
    case DriverFamily::PureQuadratic: return "pure-quadratic";
    case DriverFamily::LinearPlusQuadratic: return "linear-plus-quadratic";
    case DriverFamily::ConvexCustom: return "convex-custom";
  }
  return "?";
}

namespace {
AssumptionParams with_default_phi(AssumptionParams p) {
  if (p.phi.is_linear() && p.phi.linear_slope() == 0.0 && p.beta > 0.0)
    p.phi = GrowthFn::linear(p.beta);
  return p;
}
}  // namespace

DriverSpec DriverSpec::zero(AssumptionParams params, int dim) {
  params = with_default_phi(std::move(params));
  params.validate();
  return DriverSpec(DriverFamily::Zero, std::move(params), 0.0, dim);
}

DriverSpec DriverSpec::linear_in_y(AssumptionParams params, double y_slope, int dim) {
  params = with_default_phi(std::move(params));
  params.validate();
  return DriverSpec(DriverFamily::LinearInY, std::move(params), y_slope, dim);
}

DriverSpec DriverSpec::pure_quadratic(AssumptionParams params, int dim) {
  params = with_default_phi(std::move(params));
  params.validate();
  return DriverSpec(DriverFamily::PureQuadratic, std::move(params), 0.0, dim);
}

DriverSpec DriverSpec::linear_plus_quadratic(AssumptionParams params, double y_slope,
                                             int dim) {
  params = with_default_phi(std::move(params));
  params.validate();
  return DriverSpec(DriverFamily::LinearPlusQuadratic, std::move(params), y_slope, dim);
}

DriverSpec DriverSpec::convex_custom(AssumptionParams params, std::vector<double> zs,
                                     std::vector<double> rho, double y_slope, int dim) {
  params = with_default_phi(std::move(params));
  params.validate();
  if (zs.size() != rho.size() || zs.size() < 2)
    throw std::invalid_argument("convex-custom: table needs >= 2 matching points");
  for (std::size_t i = 1; i < zs.size(); ++i)
    if (!(zs[i] > zs[i - 1]))
      throw std::invalid_argument("convex-custom: z abscissae must increase");
  if (zs.front() != 0.0)
    throw std::invalid_argument("convex-custom: table must start at |z| = 0");
  DriverSpec d(DriverFamily::ConvexCustom, std::move(params), y_slope, dim);
  d.rho_xs_ = std::move(zs);
  d.rho_ys_ = std::move(rho);
  return d;
}

DriverSpec DriverSpec::with_alpha(AlphaProcess alpha) const {
  DriverSpec d = *this;
  d.params_.alpha = std::move(alpha);
  return d;
}

double DriverSpec::custom_rho(double znorm) const {
  const std::size_t n = rho_xs_.size();
  if (znorm >= rho_xs_.back()) {
    const double slope = (rho_ys_[n - 1] - rho_ys_[n - 2]) / (rho_xs_[n - 1] - rho_xs_[n - 2]);
    return rho_ys_.back() + slope * (znorm - rho_xs_.back());
  }
  std::size_t i = 1;
  while (rho_xs_[i] < znorm) ++i;
  const double w = (znorm - rho_xs_[i - 1]) / (rho_xs_[i] - rho_xs_[i - 1]);
  return rho_ys_[i - 1] + w * (rho_ys_[i] - rho_ys_[i - 1]);
}

double DriverSpec::eval(double t, double y, std::span<const double> z) const {
  if (static_cast<int>(z.size()) != dim_)
    throw std::invalid_argument("driver: z has wrong dimension");
  if (t < 0.0 || t > params_.horizon)
    throw std::invalid_argument("driver: t outside [0, T]");
  double zsq = 0.0;
  for (double zi : z) zsq += zi * zi;
  switch (family_) {
    case DriverFamily::Zero:
      return 0.0;
    case DriverFamily::LinearInY:
      return params_.alpha.value(t) + y_slope_ * y;
    case DriverFamily::PureQuadratic:
      return params_.alpha.value(t) + 0.5 * params_.gamma * zsq;
    case DriverFamily::LinearPlusQuadratic:
      return params_.alpha.value(t) + y_slope_ * y + 0.5 * params_.gamma * zsq;
    case DriverFamily::ConvexCustom:
      // alpha is the growth allowance only; constants belong in the table.
      return y_slope_ * y + custom_rho(std::sqrt(zsq));
  }
  return 0.0;
}

AssumptionCertificate certify_assumptions(const DriverSpec& driver,
                                          std::int64_t budget, double tol,
                                          std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("certify_assumptions: budget >= 1");
  constexpr double kYRange = 10.0;
  constexpr double kZRange = 10.0;
  const CounterRng rng(seed, RngStream::Certify);
  const AssumptionParams& p = driver.params();
  const int d = driver.dim();

  AssumptionCertificate cert;
  cert.budget = budget;
  cert.tolerance = tol;
  cert.seed = seed;

  std::vector<double> z(static_cast<std::size_t>(d));
  std::vector<double> z2(static_cast<std::size_t>(d));
  std::vector<double> zm(static_cast<std::size_t>(d));
  for (std::int64_t s = 0; s < budget; ++s) {
    const auto c = static_cast<std::uint64_t>(s);
    const double t = p.horizon * rng.uniform(c, 0, 0);
    const double y = kYRange * (2.0 * rng.uniform(c, 1, 0) - 1.0);
    const double y2 = kYRange * (2.0 * rng.uniform(c, 2, 0) - 1.0);
    const double lam = rng.uniform(c, 3, 0);
    for (int k = 0; k < d; ++k) {
      z[static_cast<std::size_t>(k)] =
          kZRange * (2.0 * rng.uniform(c, 4, static_cast<std::uint64_t>(k)) - 1.0);
      z2[static_cast<std::size_t>(k)] =
          kZRange * (2.0 * rng.uniform(c, 5, static_cast<std::uint64_t>(k)) - 1.0);
      zm[static_cast<std::size_t>(k)] = lam * z[static_cast<std::size_t>(k)] +
                                        (1.0 - lam) * z2[static_cast<std::size_t>(k)];
    }

    const double fz = driver.eval(t, y, z);
    const double fz2 = driver.eval(t, y, z2);
    const double fzm = driver.eval(t, y, zm);
    // Midpoint convexity deficit: lam f(z) + (1-lam) f(z') - f(mid) >= 0.
    const double deficit = lam * fz + (1.0 - lam) * fz2 - fzm;
    cert.convexity_violation = std::max(cert.convexity_violation, -deficit);

    const double fy2 = driver.eval(t, y2, z);
    cert.lipschitz_violation =
        std::max(cert.lipschitz_violation, std::abs(fz - fy2) - p.beta * std::abs(y - y2));

    double zsq = 0.0;
    for (double zi : z) zsq += zi * zi;
    const double bound = p.alpha.value(t) + p.phi(std::abs(y)) + 0.5 * p.gamma * zsq;
    cert.growth_violation = std::max(cert.growth_violation, std::abs(fz) - bound);
  }
  cert.convexity_violation = std::max(0.0, cert.convexity_violation);
  cert.lipschitz_violation = std::max(0.0, cert.lipschitz_violation);
  cert.growth_violation = std::max(0.0, cert.growth_violation);
  cert.pass = cert.passes(tol);
  return cert;
}

}  // namespace qbsde
