// 1-D semilinear PDE lab:  u_t + (sigma^2/2) u_xx + b u_x + f(t,x,u, sigma u_x) = 0,
// u(T, .) = g, solved backward by a semi-implicit scheme (diffusion implicit,
// drift and nonlinearity explicit with central gradients), cross-checked
// against the probabilistic representation u(t,x) = Y_t^{t,x}.

#ifndef QBSDE_PDE_HPP
#define QBSDE_PDE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qbsde/lsmc.hpp"
#include "qbsde/sde.hpp"

namespace qbsde {

struct PdeProblem {
  std::function<double(double, double)> drift;        // b(t, x)
  std::function<double(double, double)> diffusion;    // sigma(t, x), scalar
  // Nonlinearity f(t, x, u, w); w receives sigma * u_x (the Z slot).
  std::function<double(double, double, double, double)> nonlinearity;
  std::function<double(double)> terminal;             // g(x)
  double growth_p = 1.0;       // p in [1, 2)
  double lipschitz_beta = 0.0; // certified Lipschitz constant of b, sigma
  double sigma_bound = 1.0;    // certified sup |sigma|
  double growth_beta = 1.0;    // |f| + |g| <= growth_beta (1 + |x|^p + |u| + w^2)
};

struct PdeGrid {
  double x_lo = -6.0, x_hi = 6.0;
  int space_nodes = 401;  // J
  int time_layers = 4096; // N

  void validate() const;
  double dx() const { return (x_hi - x_lo) / (space_nodes - 1); }
  double node(int j) const { return x_lo + dx() * j; }
};

struct PdeCertificate {
  SdeCertificate coefficients;     // Lipschitz b/sigma, bounded sigma
  double convexity_violation = 0.0;  // midpoint test in w
  double growth_violation = 0.0;     // |f| + |g| against the growth budget
  bool pass = false;
};

PdeCertificate certify_pde_problem(const PdeProblem& problem, std::int64_t budget,
                                   double tol, std::uint64_t seed);

struct FdOptions {
  double mesh_c = 0.5;       // require dt <= mesh_c dx^2 / sigma_bound^2
  double gradient_clip = 50.0;
};

struct PdeSolution {
  PdeGrid grid;
  double horizon = 1.0;
  std::vector<double> u;  // (N+1) x J, layer-major
  long gradient_clip_events = 0;

  double at(int layer, int j) const {
    return u[static_cast<std::size_t>(layer) * grid.space_nodes + j];
  }
  // Bilinear interpolation in (t, x).
  double interp(double t, double x) const;
};

// Backward time-marching; diffusion implicit (tridiagonal solve), drift and
// nonlinearity explicit. Boundary rows impose the PDE with one-sided
// differences (exact for affine and quadratic profiles, consistent with the
// subquadratic growth bound). Throws on mesh violation, singular tridiagonal
// rows and detected blow-up.
PdeSolution fd_solve(const PdeProblem& problem, const PdeGrid& grid, double horizon,
                     const FdOptions& options = {});

struct FkOptions {
  int paths = 20000;
  int steps = 64;
  std::uint64_t seed = 7;
  int basis_degree = 3;
  PicardConfig picard;
  int resolves = 5;  // subsample re-solves behind the reported CI
};

struct FkResult {
  double value = 0.0;  // Y at (t0, x0)
  double se = 0.0;     // spread of subsample re-solves
  double ci_lo = 0.0, ci_hi = 0.0;
};

// Monte Carlo value u(t0, x0) = Y_{t0}^{t0, x0} via forward simulation plus
// the backward solver; requires a passing problem certificate.
FkResult feynman_kac_u(double t0, double x0, const PdeProblem& problem,
                       double horizon, const FkOptions& options = {});

struct PdePointReport {
  double t = 0.0, x = 0.0;
  double u_fd = 0.0, u_mc = 0.0, mc_se = 0.0;
  double discrepancy = 0.0;
  double budget = 0.0;
  bool pass = false;
};

struct PdeCompareOptions {
  FkOptions fk;
  double fd_truncation = 1e-3;  // FD share of the tolerance budget
};

struct PdeCompareReport {
  std::vector<PdePointReport> points;
  double max_discrepancy = 0.0;
  bool pass = false;
};

// The default 9-point sample set: (0, x) for x in {-2,-1,0,1,2} and
// (T/2, x) for x in {-1,0,1}, plus (T/4, 0).
std::vector<std::pair<double, double>> default_compare_points(double horizon);

PdeCompareReport compare_pde_mc(const PdeProblem& problem, const PdeGrid& grid,
                                double horizon,
                                std::span<const std::pair<double, double>> points,
                                const PdeCompareOptions& options = {});

struct GrowthCheck {
  double c_base = 0.0;   // fitted C on the central 2/3 of the span
  double c_full = 0.0;   // fitted C on the full span
  bool pass = false;     // finite and c_full <= 2 c_base
};

// Fits the minimal C with |u| <= C (1 + |x|^p) and checks stability of the
// fit under enlarging the domain (the designed failure is superpolynomial u).
GrowthCheck check_growth(std::span<const double> xs, std::span<const double> us,
                         double p);

}  // namespace qbsde

#endif
