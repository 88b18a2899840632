// Least-squares projection onto polynomial bases of a scalar regressor
// (Brownian value or simulated state). The regressor is standardized
// internally; ridge 1e-10 keeps degenerate targets well posed.

#ifndef QBSDE_REGRESSION_HPP
#define QBSDE_REGRESSION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "qbsde/math_util.hpp"

namespace qbsde {

enum class BasisKind { BrownianPoly, StatePoly };

struct RegressionBasis {
  BasisKind kind = BasisKind::BrownianPoly;
  int degree = 3;
  // Optional clipping of the regressor before basis evaluation.
  double clip_lo = -kInf;
  double clip_hi = kInf;

  void validate() const;
};

inline constexpr double kRegressionRidge = 1e-10;

struct PolyFit {
  std::vector<double> coeffs;  // in the standardized variable
  double shift = 0.0, scale = 1.0;
  double clip_lo = -kInf, clip_hi = kInf;
  double condition = 1.0;  // condition number of the (normalized) Gram matrix

  double operator()(double x) const {
    x = x < clip_lo ? clip_lo : (x > clip_hi ? clip_hi : x);
    const double u = (x - shift) / scale;
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * u + coeffs[j];
    return acc;
  }
};

// Shared design factorization so several targets reuse one Gram matrix.
class PolyDesign {
public:
  // mask (optional) selects the fitting subsample; fits are evaluated on
  // every point regardless.
  PolyDesign(std::span<const double> x, const RegressionBasis& basis,
             std::span<const std::uint8_t> mask = {});

  PolyFit fit(std::span<const double> y) const;
  double condition() const { return condition_; }

private:
  int k_;
  double shift_, scale_;
  double clip_lo_, clip_hi_;
  double condition_;
  std::vector<double> gram_;          // k x k, normalized by subsample size
  std::vector<double> powers_;        // n x k standardized basis rows
  std::vector<std::uint8_t> active_;  // subsample indicator
  std::size_t active_count_;
};

}  // namespace qbsde

#endif
