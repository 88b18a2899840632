#include "qbsde/growth_fn.hpp"

#include <stdexcept>

namespace qbsde {

GrowthFn GrowthFn::linear(double slope) {
  if (!(slope >= 0.0)) throw std::invalid_argument("GrowthFn: slope >= 0");
  GrowthFn g;
  g.slope_ = slope;
  return g;
}

GrowthFn GrowthFn::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("GrowthFn: table needs >= 2 matching points");
  if (xs.front() != 0.0 || ys.front() != 0.0)
    throw std::invalid_argument("GrowthFn: phi(0) = 0 required");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("GrowthFn: xs must increase");
    if (!(ys[i] >= ys[i - 1])) throw std::invalid_argument("GrowthFn: phi nondecreasing");
  }
  GrowthFn g;
  g.xs_ = std::move(xs);
  g.ys_ = std::move(ys);
  const std::size_t n = g.xs_.size();
  g.slope_ = (g.ys_[n - 1] - g.ys_[n - 2]) / (g.xs_[n - 1] - g.xs_[n - 2]);
  return g;
}

double GrowthFn::operator()(double x) const {
  if (x < 0.0) x = 0.0;
  if (xs_.empty()) return slope_ * x;
  if (x >= xs_.back()) return ys_.back() + slope_ * (x - xs_.back());
  std::size_t i = 1;
  while (xs_[i] < x) ++i;
  const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
}

}  // namespace qbsde
