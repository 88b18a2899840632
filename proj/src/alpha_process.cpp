#include "qbsde/alpha_process.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qbsde {

AlphaProcess::AlphaProcess() : breakpoints_{0.0}, values_{0.0} {}

AlphaProcess::AlphaProcess(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size())
    throw std::invalid_argument("AlphaProcess: one value per breakpoint required");
  if (breakpoints_.front() != 0.0)
    throw std::invalid_argument("AlphaProcess: first breakpoint must be 0");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i] > breakpoints_[i - 1]))
      throw std::invalid_argument("AlphaProcess: breakpoints must increase");
  for (double v : values_)
    if (!(v >= 0.0)) throw std::invalid_argument("AlphaProcess: values >= 0");
}

AlphaProcess AlphaProcess::constant(double value) {
  return AlphaProcess({0.0}, {value});
}

double AlphaProcess::value(double t) const {
  std::size_t i = breakpoints_.size() - 1;
  while (i > 0 && t < breakpoints_[i]) --i;
  return values_[i];
}

double AlphaProcess::integral(double a, double b) const {
  return weighted_integral(a, b, 0.0);
}

double AlphaProcess::weighted_integral(double a, double b, double beta) const {
  if (!(b >= a)) throw std::invalid_argument("AlphaProcess: integral needs b >= a");
  double total = 0.0;
  const std::size_t n = breakpoints_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::max(a, breakpoints_[i]);
    const double hi =
        std::min(b, i + 1 < n ? breakpoints_[i + 1] : std::numeric_limits<double>::infinity());
    if (hi <= lo) continue;
    if (beta == 0.0) {
      total += values_[i] * (hi - lo);
    } else {
      total += values_[i] * (std::exp(beta * (hi - a)) - std::exp(beta * (lo - a))) / beta;
    }
  }
  return total;
}

AlphaProcess AlphaProcess::truncated_at_budget(double budget) const {
  if (!(budget >= 0.0)) throw std::invalid_argument("AlphaProcess: budget >= 0");
  if (std::isinf(budget)) return *this;
  std::vector<double> bps, vals;
  double used = 0.0;
  const std::size_t n = breakpoints_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = breakpoints_[i];
    const double hi = i + 1 < n ? breakpoints_[i + 1] : std::numeric_limits<double>::infinity();
    bps.push_back(lo);
    vals.push_back(values_[i]);
    if (values_[i] <= 0.0) continue;
    const double piece = values_[i] * (hi - lo);
    if (used + piece >= budget) {
      const double hit = lo + (budget - used) / values_[i];
      if (hit < hi) {
        bps.push_back(hit);
        vals.push_back(0.0);
      }
      return AlphaProcess(std::move(bps), std::move(vals));
    }
    used += piece;
  }
  return AlphaProcess(std::move(bps), std::move(vals));
}

bool AlphaProcess::is_zero() const {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

}  // namespace qbsde
