// Deterministic piecewise-constant alpha(t) >= 0 with exact integrals.

#ifndef QBSDE_ALPHA_PROCESS_HPP
#define QBSDE_ALPHA_PROCESS_HPP

#include <vector>

namespace qbsde {

class AlphaProcess {
public:
  AlphaProcess();  // identically zero
  // alpha(t) = values[i] on [breakpoints[i], breakpoints[i+1]); the last
  // piece extends forward. breakpoints[0] must be 0.
  AlphaProcess(std::vector<double> breakpoints, std::vector<double> values);

  static AlphaProcess constant(double value);

  double value(double t) const;

  // Exact integral of alpha over [a, b].
  double integral(double a, double b) const;

  // Exact integral of alpha(r) e^{beta (r - a)} over [a, b].
  double weighted_integral(double a, double b, double beta) const;

  // |alpha|_1 on [0, horizon].
  double total_mass(double horizon) const { return integral(0.0, horizon); }

  // alpha set to zero from the instant its running integral reaches `budget`
  // (the trailing piece is split exactly at the hitting time).
  AlphaProcess truncated_at_budget(double budget) const;

  bool is_zero() const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }

private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

}  // namespace qbsde

#endif
