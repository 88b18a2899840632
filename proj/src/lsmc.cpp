#include "qbsde/lsmc.hpp"

#include <cmath>
#include <stdexcept>

#include "qbsde/rng.hpp"

namespace qbsde {

namespace {

std::vector<std::uint8_t> subsample_mask(int paths, int layer,
                                         const SolveOptions& options) {
  std::vector<std::uint8_t> mask;
  if (options.subsample_fraction >= 1.0) return mask;
  if (!(options.subsample_fraction > 0.0))
    throw std::invalid_argument("lsmc: subsample fraction in (0, 1] required");
  const CounterRng rng(options.regression_seed, RngStream::Subsample);
  mask.resize(static_cast<std::size_t>(paths));
  std::size_t kept = 0;
  for (int m = 0; m < paths; ++m) {
    mask[static_cast<std::size_t>(m)] =
        rng.uniform(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(layer), 7) <
        options.subsample_fraction;
    kept += mask[static_cast<std::size_t>(m)];
  }
  if (kept == 0) mask.assign(static_cast<std::size_t>(paths), 1);
  return mask;
}

}  // namespace

DriverFn driver_fn(const DriverSpec& driver) {
  return [driver](double t, double, double y, std::span<const double> z) {
    return driver.eval(t, y, z);
  };
}

BsdeSolution solve_backward_lsmc_fn(const DriverFn& f, std::vector<double> terminal,
                                    const PathEnsemble& ens, const RegressionBasis& basis,
                                    const PicardConfig& picard,
                                    const SolveOptions& options, int start_index) {
  const int paths = ens.paths;
  const int n = ens.grid.steps;
  const int d = ens.dim;
  const double dt = ens.grid.dt();
  if (static_cast<int>(terminal.size()) != paths)
    throw std::invalid_argument("lsmc: terminal sample count mismatch");
  if (start_index < 0 || start_index > n)
    throw std::invalid_argument("lsmc: start index outside the grid");
  if (basis.kind == BasisKind::StatePoly && !ens.has_states())
    throw std::invalid_argument("lsmc: state basis needs simulated states");
  if (!(picard.tol > 0.0)) throw std::invalid_argument("lsmc: picard tol > 0");

  BsdeSolution sol;
  sol.grid = ens.grid;
  sol.paths = paths;
  sol.dim = d;
  sol.start_index = start_index;
  sol.sup_abs_y.assign(static_cast<std::size_t>(paths), 0.0);
  sol.z_sq_integral.assign(static_cast<std::size_t>(paths), 0.0);
  if (options.store_fields) {
    sol.y_fields.assign(static_cast<std::size_t>(n + 1) * paths, 0.0);
    sol.z_fields.assign(static_cast<std::size_t>(n) * paths * d, 0.0);
  }

  const std::size_t np = static_cast<std::size_t>(paths);
  std::vector<double> ynext = std::move(terminal);  // layer i+1 values
  std::vector<double> ycur(np);
  std::vector<double> cont(np);              // fitted continuation C_i
  std::vector<double> zcur(np * static_cast<std::size_t>(d));
  std::vector<double> ztarget(np);
  std::vector<double> xreg(np);   // regressor at the current layer
  std::vector<double> bcur(np);   // running Brownian level (coordinate 0)

  for (int m = 0; m < paths; ++m) {
    double b = 0.0;
    for (int i = 0; i < n; ++i) b += ens.increment(m, i, 0);
    bcur[static_cast<std::size_t>(m)] = b;
    sol.sup_abs_y[static_cast<std::size_t>(m)] = std::abs(ynext[static_cast<std::size_t>(m)]);
  }
  if (options.store_fields)
    std::copy(ynext.begin(), ynext.end(), sol.y_fields.begin() + static_cast<std::size_t>(n) * paths);

  const double clip = picard.z_clip;
  std::vector<double> zrow(static_cast<std::size_t>(d));

  for (int i = n - 1; i >= start_index; --i) {
    const double t = ens.grid.node(i);
    for (int m = 0; m < paths; ++m)
      bcur[static_cast<std::size_t>(m)] -= ens.increment(m, i, 0);
    for (int m = 0; m < paths; ++m)
      xreg[static_cast<std::size_t>(m)] =
          basis.kind == BasisKind::StatePoly ? ens.state(m, i) : bcur[static_cast<std::size_t>(m)];

    if (i == start_index) {
      // Trivial sigma-field at the start layer: plain cross-path means.
      const double c0 = mean(ynext);
      std::fill(cont.begin(), cont.end(), c0);
      for (int k = 0; k < d; ++k) {
        for (int m = 0; m < paths; ++m)
          ztarget[static_cast<std::size_t>(m)] =
              (ynext[static_cast<std::size_t>(m)] - c0) * ens.increment(m, i, k) / dt;
        const double zk = mean(ztarget);
        for (int m = 0; m < paths; ++m)
          zcur[static_cast<std::size_t>(m) * d + k] = zk;
      }
    } else {
      const auto mask = subsample_mask(paths, i, options);
      const PolyDesign design(xreg, basis, mask);
      sol.diag.max_condition = std::max(sol.diag.max_condition, design.condition());
      const PolyFit cfit = design.fit(ynext);
      for (int m = 0; m < paths; ++m)
        cont[static_cast<std::size_t>(m)] = cfit(xreg[static_cast<std::size_t>(m)]);
      for (int k = 0; k < d; ++k) {
        for (int m = 0; m < paths; ++m)
          ztarget[static_cast<std::size_t>(m)] =
              (ynext[static_cast<std::size_t>(m)] - cont[static_cast<std::size_t>(m)]) *
              ens.increment(m, i, k) / dt;
        const PolyFit zfit = design.fit(ztarget);
        for (int m = 0; m < paths; ++m)
          zcur[static_cast<std::size_t>(m) * d + k] = zfit(xreg[static_cast<std::size_t>(m)]);
      }
    }

    // Picard iteration, implicit in y, explicit in (clipped) z.
    int iters = 0;
    double residual = 0.0;
    for (int m = 0; m < paths; ++m) {
      const std::size_t mi = static_cast<std::size_t>(m);
      double znorm2 = 0.0;
      for (int k = 0; k < d; ++k) {
        zrow[static_cast<std::size_t>(k)] = zcur[mi * d + k];
        znorm2 += zrow[static_cast<std::size_t>(k)] * zrow[static_cast<std::size_t>(k)];
      }
      if (clip > 0.0 && znorm2 > clip * clip) {
        const double s = clip / std::sqrt(znorm2);
        for (int k = 0; k < d; ++k) zrow[static_cast<std::size_t>(k)] *= s;
        ++sol.diag.clip_events;
      }
      const double x = ens.has_states() ? ens.state(m, i) : bcur[mi];
      double y = cont[mi];
      double delta = kInf;
      int it = 0;
      for (; it < picard.max_iters; ++it) {
        const double ynew = cont[mi] + dt * f(t, x, y, zrow);
        delta = std::abs(ynew - y);
        y = ynew;
        if (delta <= picard.tol) break;
      }
      if (delta > picard.tol)
        throw PicardError("picard iteration did not converge at layer " +
                              std::to_string(i) + " (residual " + std::to_string(delta) + ")",
                          i, delta);
      iters = std::max(iters, it + 1);
      residual = std::max(residual, delta);
      ycur[mi] = y;
      if (!std::isfinite(y))
        throw BlowUpError("non-finite Y at layer " + std::to_string(i), i);
    }
    sol.diag.total_picard_iters += iters;
    sol.diag.max_layer_iters = std::max(sol.diag.max_layer_iters, iters);

    for (int m = 0; m < paths; ++m) {
      const std::size_t mi = static_cast<std::size_t>(m);
      sol.sup_abs_y[mi] = std::max(sol.sup_abs_y[mi], std::abs(ycur[mi]));
      double zn2 = 0.0;
      for (int k = 0; k < d; ++k) zn2 += zcur[mi * d + k] * zcur[mi * d + k];
      sol.z_sq_integral[mi] += zn2 * dt;
    }
    if (options.store_fields) {
      std::copy(ycur.begin(), ycur.end(),
                sol.y_fields.begin() + static_cast<std::size_t>(i) * paths);
      std::copy(zcur.begin(), zcur.end(),
                sol.z_fields.begin() + static_cast<std::size_t>(i) * paths * d);
    }
    ynext.swap(ycur);
  }

  sol.y0 = start_index == n ? mean(ynext) : ynext[0];
  if (options.store_fields) {
    // Layers before the start index hold the frozen start value.
    for (int i = 0; i < start_index; ++i)
      std::fill(sol.y_fields.begin() + static_cast<std::size_t>(i) * paths,
                sol.y_fields.begin() + static_cast<std::size_t>(i + 1) * paths, sol.y0);
  }
  return sol;
}

BsdeSolution solve_backward_lsmc(const DriverSpec& driver, const TerminalSpec& terminal,
                                 const PathEnsemble& ens, const RegressionBasis& basis,
                                 const PicardConfig& picard, const SolveOptions& options) {
  const AssumptionCertificate cert = certify_assumptions(driver, 2000, 1e-8, ens.seed);
  if (!cert.pass)
    throw std::invalid_argument("lsmc: driver failed its assumption certificate "
                                "(convexity " + std::to_string(cert.convexity_violation) +
                                ", lipschitz " + std::to_string(cert.lipschitz_violation) +
                                ", growth " + std::to_string(cert.growth_violation) + ")");
  const int start = ens.start_time > 0.0 ? ens.grid.index_of(ens.start_time) : 0;
  return solve_backward_lsmc_fn(driver_fn(driver), terminal_samples(terminal, ens), ens,
                                basis, picard, options, start);
}

}  // namespace qbsde
