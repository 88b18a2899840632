#include "qbsde/math_util.hpp"

#include <cstring>

namespace qbsde {

namespace {

constexpr std::size_t kLeaf = 64;

double pairwise_sum_rec(const double* xs, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_rec(xs, half) + pairwise_sum_rec(xs + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) {
  return pairwise_sum_rec(xs.data(), xs.size());
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  return pairwise_sum(sq) / static_cast<double>(n - 1);
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -kInf;
  double mx = -kInf;
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;  // all -inf, or a +-inf/nan present
  std::vector<double> shifted(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) shifted[i] = std::exp(xs[i] - mx);
  return mx + std::log(pairwise_sum(shifted));
}

double log_mean_exp(std::span<const double> xs) {
  return log_sum_exp(xs) - std::log(static_cast<double>(xs.size()));
}

MeanCi bootstrap_ci(std::size_t n, int resamples, const CounterRng& rng,
                    const std::function<double(std::span<const std::uint32_t>)>& stat) {
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  MeanCi out;
  out.value = stat(idx);
  if (resamples <= 1 || n < 2) {
    out.lo = out.hi = out.value;
    return out;
  }
  std::vector<double> reps(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform(i, static_cast<std::uint64_t>(r), 0);
      idx[i] = static_cast<std::uint32_t>(
          std::min<std::size_t>(n - 1, static_cast<std::size_t>(u * static_cast<double>(n))));
    }
    reps[static_cast<std::size_t>(r)] = stat(idx);
  }
  out.se = std::sqrt(sample_variance(reps));
  std::sort(reps.begin(), reps.end());
  const auto pick = [&](double q) {
    const double pos = q * static_cast<double>(reps.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return i + 1 < reps.size() ? (1.0 - w) * reps[i] + w * reps[i + 1] : reps[i];
  };
  out.lo = pick(0.025);
  out.hi = pick(0.975);
  return out;
}

MeanCi bootstrap_log_mean_exp(std::span<const double> exponents, int resamples,
                              std::uint64_t seed) {
  const CounterRng rng(seed, RngStream::Bootstrap);
  std::vector<double> scratch(exponents.size());
  auto stat = [&](std::span<const std::uint32_t> idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) scratch[i] = exponents[idx[i]];
    return log_mean_exp(scratch);
  };
  return bootstrap_ci(exponents.size(), resamples, rng, stat);
}

SymEig sym_eig_range(std::span<const double> a, int k) {
  // Cyclic Jacobi; k stays small (basis sizes), so cost is negligible.
  std::vector<double> m(a.begin(), a.end());
  auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i * k + j)]; };
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < k; ++p) {
      for (int q = p + 1; q < k; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int i = 0; i < k; ++i) {
          const double aip = at(i, p), aiq = at(i, q);
          at(i, p) = c * aip - s * aiq;
          at(i, q) = s * aip + c * aiq;
        }
        for (int j = 0; j < k; ++j) {
          const double apj = at(p, j), aqj = at(q, j);
          at(p, j) = c * apj - s * aqj;
          at(q, j) = s * apj + c * aqj;
        }
      }
    }
  }
  SymEig e{kInf, -kInf};
  for (int i = 0; i < k; ++i) {
    e.min = std::min(e.min, at(i, i));
    e.max = std::max(e.max, at(i, i));
  }
  return e;
}

std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b,
                              int k, double ridge) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * k + j)]; };
  for (int i = 0; i < k; ++i) at(i, i) += ridge;
  // Cholesky A = L L^T.
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = at(i, j);
      for (int p = 0; p < j; ++p) s -= at(i, p) * at(j, p);
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) {
          const SymEig e = sym_eig_range(a, k);
          throw RegressionError("singular normal equations",
                                e.min > 0 ? e.max / e.min : kInf);
        }
        at(i, i) = std::sqrt(s);
      } else {
        at(i, j) = s / at(j, j);
      }
    }
  }
  for (int i = 0; i < k; ++i) {  // forward substitution
    double s = b[static_cast<std::size_t>(i)];
    for (int p = 0; p < i; ++p) s -= at(i, p) * b[static_cast<std::size_t>(p)];
    b[static_cast<std::size_t>(i)] = s / at(i, i);
  }
  for (int i = k - 1; i >= 0; --i) {  // backward substitution
    double s = b[static_cast<std::size_t>(i)];
    for (int p = i + 1; p < k; ++p) s -= at(p, i) * b[static_cast<std::size_t>(p)];
    b[static_cast<std::size_t>(i)] = s / at(i, i);
  }
  return b;
}

}  // namespace qbsde
