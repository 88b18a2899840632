#include "qbsde/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace qbsde {

void RegressionBasis::validate() const {
  if (degree < 0) throw std::invalid_argument("basis: degree >= 0 required");
  if (degree > 12) throw std::invalid_argument("basis: degree <= 12 required");
  if (!(clip_lo < clip_hi)) throw std::invalid_argument("basis: clip_lo < clip_hi");
}

PolyDesign::PolyDesign(std::span<const double> x, const RegressionBasis& basis,
                       std::span<const std::uint8_t> mask) {
  basis.validate();
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("regression: empty design");
  if (!mask.empty() && mask.size() != n)
    throw std::invalid_argument("regression: mask size mismatch");
  k_ = basis.degree + 1;
  clip_lo_ = basis.clip_lo;
  clip_hi_ = basis.clip_hi;

  active_.assign(n, 1);
  if (!mask.empty()) std::copy(mask.begin(), mask.end(), active_.begin());
  active_count_ = 0;
  for (auto a : active_) active_count_ += a;
  if (active_count_ == 0) throw std::invalid_argument("regression: empty subsample");

  // Standardize over the fitting subsample.
  double s = 0.0, s2 = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (!active_[m]) continue;
    const double xc = std::min(std::max(x[m], clip_lo_), clip_hi_);
    s += xc;
    s2 += xc * xc;
  }
  shift_ = s / static_cast<double>(active_count_);
  const double var = s2 / static_cast<double>(active_count_) - shift_ * shift_;
  scale_ = var > 1e-300 ? std::sqrt(var) : 1.0;

  powers_.resize(n * static_cast<std::size_t>(k_));
  for (std::size_t m = 0; m < n; ++m) {
    const double xc = std::min(std::max(x[m], clip_lo_), clip_hi_);
    const double u = (xc - shift_) / scale_;
    double p = 1.0;
    for (int j = 0; j < k_; ++j) {
      powers_[m * k_ + j] = p;
      p *= u;
    }
  }

  gram_.assign(static_cast<std::size_t>(k_) * k_, 0.0);
  // Blocked pairwise accumulation keeps the sum order fixed.
  constexpr std::size_t kBlock = 1024;
  std::vector<double> partial(static_cast<std::size_t>(k_) * k_);
  std::vector<std::vector<double>> blocks;
  for (std::size_t start = 0; start < n; start += kBlock) {
    std::fill(partial.begin(), partial.end(), 0.0);
    const std::size_t end = std::min(n, start + kBlock);
    for (std::size_t m = start; m < end; ++m) {
      if (!active_[m]) continue;
      const double* row = &powers_[m * k_];
      for (int i = 0; i < k_; ++i)
        for (int j = i; j < k_; ++j)
          partial[static_cast<std::size_t>(i) * k_ + j] += row[i] * row[j];
    }
    blocks.push_back(partial);
  }
  while (blocks.size() > 1) {
    std::vector<std::vector<double>> next;
    for (std::size_t b = 0; b + 1 < blocks.size(); b += 2) {
      auto merged = blocks[b];
      for (std::size_t t = 0; t < merged.size(); ++t) merged[t] += blocks[b + 1][t];
      next.push_back(std::move(merged));
    }
    if (blocks.size() % 2) next.push_back(blocks.back());
    blocks.swap(next);
  }
  gram_ = blocks.front();
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < i; ++j)
      gram_[static_cast<std::size_t>(i) * k_ + j] = gram_[static_cast<std::size_t>(j) * k_ + i];
  for (auto& g : gram_) g /= static_cast<double>(active_count_);

  const SymEig eig = sym_eig_range(gram_, k_);
  if (!(eig.min > 0.0) || eig.max / eig.min > 1e14)
    throw RegressionError("regression design is numerically singular",
                          eig.min > 0 ? eig.max / eig.min : kInf);
  condition_ = eig.max / eig.min;
}

PolyFit PolyDesign::fit(std::span<const double> y) const {
  const std::size_t n = y.size();
  if (n * static_cast<std::size_t>(k_) != powers_.size())
    throw std::invalid_argument("regression: target size mismatch");

  // Center the target over the fitting subsample so constant targets are
  // reproduced exactly despite the ridge.
  double ysum = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    if (active_[m]) ysum += y[m];
  const double ymean = ysum / static_cast<double>(active_count_);

  std::vector<double> rhs(static_cast<std::size_t>(k_), 0.0);
  constexpr std::size_t kBlock = 1024;
  std::vector<std::vector<double>> blocks;
  std::vector<double> partial(static_cast<std::size_t>(k_));
  for (std::size_t start = 0; start < n; start += kBlock) {
    std::fill(partial.begin(), partial.end(), 0.0);
    const std::size_t end = std::min(n, start + kBlock);
    for (std::size_t m = start; m < end; ++m) {
      if (!active_[m]) continue;
      const double* row = &powers_[m * k_];
      const double yc = y[m] - ymean;
      for (int j = 0; j < k_; ++j) partial[static_cast<std::size_t>(j)] += row[j] * yc;
    }
    blocks.push_back(partial);
  }
  while (blocks.size() > 1) {
    std::vector<std::vector<double>> next;
    for (std::size_t b = 0; b + 1 < blocks.size(); b += 2) {
      auto merged = blocks[b];
      for (std::size_t t = 0; t < merged.size(); ++t) merged[t] += blocks[b + 1][t];
      next.push_back(std::move(merged));
    }
    if (blocks.size() % 2) next.push_back(blocks.back());
    blocks.swap(next);
  }
  rhs = blocks.front();
  for (auto& r : rhs) r /= static_cast<double>(active_count_);

  PolyFit fit;
  fit.coeffs = solve_spd(gram_, std::move(rhs), k_, kRegressionRidge);
  fit.coeffs[0] += ymean;
  fit.shift = shift_;
  fit.scale = scale_;
  fit.clip_lo = clip_lo_;
  fit.clip_hi = clip_hi_;
  fit.condition = condition_;
  return fit;
}

}  // namespace qbsde
