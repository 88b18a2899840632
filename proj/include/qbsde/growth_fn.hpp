// Nondecreasing growth function phi with phi(0) = 0.

#ifndef QBSDE_GROWTH_FN_HPP
#define QBSDE_GROWTH_FN_HPP

#include <vector>

namespace qbsde {

class GrowthFn {
public:
  GrowthFn() : slope_(0.0) {}  // phi == 0

  static GrowthFn linear(double slope);
  // Piecewise-linear table on xs (increasing from 0) with values ys
  // (nondecreasing from 0); extrapolated with the last slope.
  static GrowthFn table(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;
  bool is_linear() const { return xs_.empty(); }
  double linear_slope() const { return slope_; }

private:
  double slope_;
  std::vector<double> xs_, ys_;
};

}  // namespace qbsde

#endif
