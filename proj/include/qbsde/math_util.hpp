// Deterministic reductions and numerics shared across the library.
// All sums over samples go through pairwise trees with a fixed shape,
// so results are bit-stable for a given input ordering.

#ifndef QBSDE_MATH_UTIL_HPP
#define QBSDE_MATH_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qbsde/errors.hpp"
#include "qbsde/rng.hpp"

namespace qbsde {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest exponent for which exp() is representable in double.
inline double log_double_max() {
  static const double v = std::log(std::numeric_limits<double>::max());
  return v;
}

double pairwise_sum(std::span<const double> xs);
double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

// log(sum exp(xs)) without leaving the representable range.
double log_sum_exp(std::span<const double> xs);
double log_mean_exp(std::span<const double> xs);

struct MeanCi {
  double value = 0.0;  // point estimate
  double se = 0.0;     // bootstrap standard error
  double lo = 0.0;     // percentile 2.5%
  double hi = 0.0;     // percentile 97.5%
};

// Nonparametric bootstrap of an arbitrary index-resampled statistic.
// `stat` receives a multiset of sample indices (size n).
MeanCi bootstrap_ci(std::size_t n, int resamples, const CounterRng& rng,
                    const std::function<double(std::span<const std::uint32_t>)>& stat);

// Bootstrap CI for log-mean-exp of the given exponents (percentile method).
MeanCi bootstrap_log_mean_exp(std::span<const double> exponents, int resamples,
                              std::uint64_t seed);

// Symmetric k x k helpers (row-major, k small).
struct SymEig {
  double min = 0.0;
  double max = 0.0;
};
SymEig sym_eig_range(std::span<const double> a, int k);

// Solves (A + ridge I) x = b for symmetric positive semidefinite A.
// Throws RegressionError when the system is numerically singular.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b,
                              int k, double ridge);

}  // namespace qbsde

#endif
