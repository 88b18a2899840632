// Backward least-squares Monte Carlo solver for the BSDE
//   Y_t = xi + int_t^T f(s, Y_s, Z_s) ds - int_t^T Z_s dB_s.
// Scheme: implicit-in-y / explicit-in-z backward Euler with a Picard inner
// loop; conditional expectations by polynomial regression. Z is projected
// from the martingale-increment residual (Y_{i+1} - C_i) dB_i / dt, which
// has the same conditional mean as Y_{i+1} dB_i / dt with far lower variance.

#ifndef QBSDE_LSMC_HPP
#define QBSDE_LSMC_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qbsde/driver.hpp"
#include "qbsde/ensemble.hpp"
#include "qbsde/regression.hpp"
#include "qbsde/terminal.hpp"

namespace qbsde {

struct PicardConfig {
  int max_iters = 50;
  double tol = 1e-10;       // sup over paths of the y-update
  double z_clip = 50.0;     // |z| fed to f during iteration; <= 0 disables
};

struct SolveOptions {
  bool store_fields = true;          // keep full (Y, Z) arrays
  double subsample_fraction = 1.0;   // regression fitting subsample
  std::uint64_t regression_seed = 0; // selects the subsample
};

struct SolveDiagnostics {
  long total_picard_iters = 0;
  int max_layer_iters = 0;
  long clip_events = 0;
  double max_condition = 0.0;
};

struct BsdeSolution {
  TimeGrid grid;
  int paths = 0;
  int dim = 1;
  int start_index = 0;  // backward recursion stops at this layer
  double y0 = 0.0;      // deterministic value at the start layer

  // Layer-major fields when stored: y (N+1) x M, z N x M x d.
  std::vector<double> y_fields;
  std::vector<double> z_fields;

  // Always available per-path summaries over layers >= start_index.
  std::vector<double> sup_abs_y;
  std::vector<double> z_sq_integral;  // sum_i |Z_i|^2 dt

  SolveDiagnostics diag;

  bool has_fields() const { return !y_fields.empty(); }
  double y(int i, int m) const {
    return y_fields[static_cast<std::size_t>(i) * paths + m];
  }
  double z(int i, int m, int k = 0) const {
    return z_fields[(static_cast<std::size_t>(i) * paths + m) * dim + k];
  }
};

// Generator as a plain function of (t, x, y, z); x is the simulated state
// when present, otherwise the Brownian level (drivers free to ignore it).
using DriverFn = std::function<double(double, double, double, std::span<const double>)>;

// Core solver; `terminal` holds xi per path and is placed bitwise into the
// last layer. Assumption certification is the caller's concern here.
BsdeSolution solve_backward_lsmc_fn(const DriverFn& f, std::vector<double> terminal,
                                    const PathEnsemble& ens, const RegressionBasis& basis,
                                    const PicardConfig& picard,
                                    const SolveOptions& options = {},
                                    int start_index = 0);

// Spec-driven entry point: certifies the driver's standing assumptions on
// sampled points first and refuses to run on a failing certificate.
BsdeSolution solve_backward_lsmc(const DriverSpec& driver, const TerminalSpec& terminal,
                                 const PathEnsemble& ens, const RegressionBasis& basis,
                                 const PicardConfig& picard,
                                 const SolveOptions& options = {});

DriverFn driver_fn(const DriverSpec& driver);

}  // namespace qbsde

#endif
