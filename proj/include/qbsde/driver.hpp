// Parametric convex-quadratic generator families and sampled certification
// of their standing assumptions (convexity in z, Lipschitz continuity in y,
// growth bound alpha(t) + phi(|y|) + (gamma/2)|z|^2).

#ifndef QBSDE_DRIVER_HPP
#define QBSDE_DRIVER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qbsde/alpha_process.hpp"
#include "qbsde/growth_fn.hpp"

namespace qbsde {

struct AssumptionParams {
  double beta = 0.0;   // Lipschitz / monotonicity constant, >= 0
  double gamma = 1.0;  // quadratic coefficient, > 0
  AlphaProcess alpha;  // nonnegative, deterministic, piecewise constant
  GrowthFn phi;        // nondecreasing, phi(0) = 0; defaults to beta * x
  double horizon = 1.0;

  void validate() const;  // throws naming the violated rule
};

enum class DriverFamily {
  Zero,
  LinearInY,
  PureQuadratic,
  LinearPlusQuadratic,
  ConvexCustom,
};

std::string to_string(DriverFamily f);

class DriverSpec {
public:
  static DriverSpec zero(AssumptionParams params, int dim = 1);
  // f = alpha(t) + y_slope * y, |y_slope| <= beta for a passing certificate.
  static DriverSpec linear_in_y(AssumptionParams params, double y_slope, int dim = 1);
  // f = alpha(t) + (gamma/2) |z|^2  (the exponential-transform family).
  static DriverSpec pure_quadratic(AssumptionParams params, int dim = 1);
  // f = alpha(t) + y_slope * y + (gamma/2) |z|^2.
  static DriverSpec linear_plus_quadratic(AssumptionParams params, double y_slope,
                                          int dim = 1);
  // f = alpha(t) + y_slope * y + rho(|z|) with rho tabulated on zs
  // (linear interpolation, last-slope extrapolation). Convexity of the
  // table is certified, not assumed.
  static DriverSpec convex_custom(AssumptionParams params, std::vector<double> zs,
                                  std::vector<double> rho, double y_slope, int dim = 1);

  double eval(double t, double y, std::span<const double> z) const;

  DriverFamily family() const { return family_; }
  const AssumptionParams& params() const { return params_; }
  double y_slope() const { return y_slope_; }
  int dim() const { return dim_; }
  bool is_exponential_family() const { return family_ == DriverFamily::PureQuadratic; }

  // Replaces alpha (used by the truncation machinery).
  DriverSpec with_alpha(AlphaProcess alpha) const;

private:
  DriverSpec(DriverFamily f, AssumptionParams p, double y_slope, int dim)
      : family_(f), params_(std::move(p)), y_slope_(y_slope), dim_(dim) {}

  double custom_rho(double znorm) const;

  DriverFamily family_;
  AssumptionParams params_;
  double y_slope_ = 0.0;
  int dim_ = 1;
  std::vector<double> rho_xs_, rho_ys_;
};

struct AssumptionCertificate {
  double convexity_violation = 0.0;  // max positive part of the midpoint deficit
  double lipschitz_violation = 0.0;  // max positive part of |df| - beta |dy|
  double growth_violation = 0.0;     // max positive part of |f| - growth bound
  std::int64_t budget = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  bool pass = false;

  bool passes(double tol) const {
    return convexity_violation <= tol && lipschitz_violation <= tol &&
           growth_violation <= tol;
  }
};

// Samples (t, y, y', z, z', lambda) tuples and records the worst violations.
// Deterministic per seed; a failing certificate is a valid return value.
AssumptionCertificate certify_assumptions(const DriverSpec& driver,
                                          std::int64_t budget, double tol,
                                          std::uint64_t seed);

}  // namespace qbsde

#endif
