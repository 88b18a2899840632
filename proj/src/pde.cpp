#include "qbsde/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qbsde/rng.hpp"

namespace qbsde {

void PdeGrid::validate() const {
  if (space_nodes < 3) throw std::invalid_argument("pde grid: J >= 3 required");
  if (time_layers < 1) throw std::invalid_argument("pde grid: N >= 1 required");
  if (!(x_hi > x_lo)) throw std::invalid_argument("pde grid: x_lo < x_hi required");
}

PdeCertificate certify_pde_problem(const PdeProblem& problem, std::int64_t budget,
                                   double tol, std::uint64_t seed) {
  PdeCertificate cert;
  SdeCoefficients coeff{problem.drift, problem.diffusion, problem.lipschitz_beta,
                        problem.sigma_bound};
  cert.coefficients = certify_sde(coeff, budget, tol, seed);

  const CounterRng rng(seed, RngStream::Certify);
  for (std::int64_t s = 0; s < budget; ++s) {
    const auto c = static_cast<std::uint64_t>(s);
    const double t = rng.uniform(c, 40, 0);
    const double x = 8.0 * (2.0 * rng.uniform(c, 41, 0) - 1.0);
    const double u = 10.0 * (2.0 * rng.uniform(c, 42, 0) - 1.0);
    const double w1 = 10.0 * (2.0 * rng.uniform(c, 43, 0) - 1.0);
    const double w2 = 10.0 * (2.0 * rng.uniform(c, 44, 0) - 1.0);
    const double lam = rng.uniform(c, 45, 0);
    const double fmid = problem.nonlinearity(t, x, u, lam * w1 + (1.0 - lam) * w2);
    const double deficit = lam * problem.nonlinearity(t, x, u, w1) +
                           (1.0 - lam) * problem.nonlinearity(t, x, u, w2) - fmid;
    cert.convexity_violation = std::max(cert.convexity_violation, -deficit);

    const double budget_rhs =
        problem.growth_beta *
        (1.0 + std::pow(std::abs(x), problem.growth_p) + std::abs(u) + w1 * w1);
    const double lhs =
        std::abs(problem.nonlinearity(t, x, u, w1)) + std::abs(problem.terminal(x));
    cert.growth_violation = std::max(cert.growth_violation, lhs - budget_rhs);
  }
  cert.convexity_violation = std::max(0.0, cert.convexity_violation);
  cert.growth_violation = std::max(0.0, cert.growth_violation);
  cert.pass = cert.coefficients.pass && cert.convexity_violation <= tol &&
              cert.growth_violation <= tol;
  return cert;
}

double PdeSolution::interp(double t, double x) const {
  const int n = static_cast<int>(u.size()) / grid.space_nodes - 1;
  const double dt = horizon / n;
  const double tpos = std::clamp(t / dt, 0.0, static_cast<double>(n));
  const int it = std::min(static_cast<int>(tpos), n - 1);
  const double wt = tpos - it;
  const double xpos = std::clamp((x - grid.x_lo) / grid.dx(), 0.0,
                                 static_cast<double>(grid.space_nodes - 1));
  const int jx = std::min(static_cast<int>(xpos), grid.space_nodes - 2);
  const double wx = xpos - jx;
  auto v = [&](int i, int j) { return at(i, j); };
  return (1.0 - wt) * ((1.0 - wx) * v(it, jx) + wx * v(it, jx + 1)) +
         wt * ((1.0 - wx) * v(it + 1, jx) + wx * v(it + 1, jx + 1));
}

namespace {

// Solves the almost-tridiagonal system whose first and last rows carry one
// extra entry (cols 0..2 and J-3..J-1): those rows are first folded into
// tridiagonal form using their neighbours, then a Thomas sweep runs.
std::vector<double> solve_boundary_augmented(std::vector<double> lower,
                                             std::vector<double> diag,
                                             std::vector<double> upper,
                                             double first_extra, double last_extra,
                                             std::vector<double> rhs, int layer) {
  const std::size_t n = diag.size();
  auto singular = [layer]() {
    return std::runtime_error("fd_solve: tridiagonal singularity at layer " +
                              std::to_string(layer));
  };
  if (first_extra != 0.0) {
    const double pivot = upper[1];
    if (std::abs(pivot) < 1e-300) throw singular();
    const double w = first_extra / pivot;
    diag[0] -= w * lower[1];
    upper[0] -= w * diag[1];
    rhs[0] -= w * rhs[1];
  }
  if (last_extra != 0.0) {
    const double pivot = lower[n - 2];
    if (std::abs(pivot) < 1e-300) throw singular();
    const double w = last_extra / pivot;
    diag[n - 1] -= w * upper[n - 2];
    lower[n - 1] -= w * diag[n - 2];
    rhs[n - 1] -= w * rhs[n - 2];
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double piv = diag[i - 1];
    if (std::abs(piv) < 1e-300) throw singular();
    const double w = lower[i] / piv;
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

}  // namespace

PdeSolution fd_solve(const PdeProblem& problem, const PdeGrid& grid, double horizon,
                     const FdOptions& options) {
  grid.validate();
  const int jn = grid.space_nodes;
  const int n = grid.time_layers;
  const double dx = grid.dx();
  const double dt = horizon / n;
  if (dt > options.mesh_c * dx * dx / (problem.sigma_bound * problem.sigma_bound))
    throw std::invalid_argument(
        "fd_solve: mesh condition dt <= c dx^2 / sigma^2 violated");

  PdeSolution sol;
  sol.grid = grid;
  sol.horizon = horizon;
  sol.u.assign(static_cast<std::size_t>(n + 1) * jn, 0.0);
  for (int j = 0; j < jn; ++j)
    sol.u[static_cast<std::size_t>(n) * jn + j] = problem.terminal(grid.node(j));

  std::vector<double> lower(static_cast<std::size_t>(jn));
  std::vector<double> diag(static_cast<std::size_t>(jn));
  std::vector<double> upper(static_cast<std::size_t>(jn));
  std::vector<double> rhs(static_cast<std::size_t>(jn));

  for (int layer = n; layer-- > 0;) {
    const double t = horizon * layer / n;
    const double* uo = &sol.u[static_cast<std::size_t>(layer + 1) * jn];

    double first_extra = 0.0, last_extra = 0.0;
    for (int j = 0; j < jn; ++j) {
      const double x = grid.node(j);
      const double sig = problem.diffusion(t, x);
      const double lam = 0.5 * dt * sig * sig / (dx * dx);
      // Explicit gradient: central in the interior, one-sided at the ends.
      double ux;
      if (j == 0) {
        ux = (uo[1] - uo[0]) / dx;
      } else if (j == jn - 1) {
        ux = (uo[jn - 1] - uo[jn - 2]) / dx;
      } else {
        ux = (uo[j + 1] - uo[j - 1]) / (2.0 * dx);
      }
      if (std::abs(ux) > options.gradient_clip) {
        ux = ux > 0 ? options.gradient_clip : -options.gradient_clip;
        ++sol.gradient_clip_events;
      }
      rhs[static_cast<std::size_t>(j)] =
          uo[j] + dt * (problem.drift(t, x) * ux +
                        problem.nonlinearity(t, x, uo[j], sig * ux));

      if (j == 0) {
        // One-sided curvature (u0 - 2 u1 + u2) / dx^2, implicit.
        diag[0] = 1.0 - lam;
        upper[0] = 2.0 * lam;
        first_extra = -lam;
        lower[0] = 0.0;
      } else if (j == jn - 1) {
        diag[static_cast<std::size_t>(j)] = 1.0 - lam;
        lower[static_cast<std::size_t>(j)] = 2.0 * lam;
        last_extra = -lam;
        upper[static_cast<std::size_t>(j)] = 0.0;
      } else {
        lower[static_cast<std::size_t>(j)] = -lam;
        diag[static_cast<std::size_t>(j)] = 1.0 + 2.0 * lam;
        upper[static_cast<std::size_t>(j)] = -lam;
      }
    }

    const std::vector<double> unew =
        solve_boundary_augmented(lower, diag, upper, first_extra, last_extra, rhs, layer);
    double* dst = &sol.u[static_cast<std::size_t>(layer) * jn];
    for (int j = 0; j < jn; ++j) {
      if (!std::isfinite(unew[static_cast<std::size_t>(j)]))
        throw BlowUpError("fd_solve: non-finite value at layer " + std::to_string(layer),
                          layer);
      dst[j] = unew[static_cast<std::size_t>(j)];
    }
  }
  return sol;
}

FkResult feynman_kac_u(double t0, double x0, const PdeProblem& problem,
                       double horizon, const FkOptions& options) {
  const PdeCertificate cert = certify_pde_problem(problem, 2000, 1e-8, options.seed);
  if (!cert.pass) throw std::invalid_argument("feynman-kac: problem certificate failed");
  if (t0 < 0.0 || t0 > horizon)
    throw std::invalid_argument("feynman-kac: t0 inside [0, T] required");

  const TimeGrid tgrid(horizon, options.steps);
  const int i0 = tgrid.index_of(t0);
  PathEnsemble ens = simulate_brownian(tgrid, options.paths, 1, options.seed);
  SdeCoefficients coeff{problem.drift, problem.diffusion, problem.lipschitz_beta,
                        problem.sigma_bound};
  simulate_sde(coeff, t0, x0, ens);

  std::vector<double> xi(static_cast<std::size_t>(ens.paths));
  for (int m = 0; m < ens.paths; ++m)
    xi[static_cast<std::size_t>(m)] = problem.terminal(ens.state(m, tgrid.steps));

  const DriverFn fn = [&problem](double t, double x, double y,
                                 std::span<const double> z) {
    return problem.nonlinearity(t, x, y, z[0]);
  };
  RegressionBasis basis;
  basis.kind = BasisKind::StatePoly;
  basis.degree = options.basis_degree;

  const BsdeSolution sol = solve_backward_lsmc_fn(fn, xi, ens, basis, options.picard,
                                                  SolveOptions{false, 1.0, 0}, i0);

  FkResult out;
  out.value = sol.y0;
  std::vector<double> replicas;
  for (int r = 0; r < options.resolves; ++r) {
    SolveOptions sub{false, 0.5, static_cast<std::uint64_t>(r + 1)};
    replicas.push_back(
        solve_backward_lsmc_fn(fn, xi, ens, basis, options.picard, sub, i0).y0);
  }
  out.se = std::sqrt(sample_variance(replicas));
  out.ci_lo = out.value - 2.0 * out.se;
  out.ci_hi = out.value + 2.0 * out.se;
  return out;
}

std::vector<std::pair<double, double>> default_compare_points(double horizon) {
  std::vector<std::pair<double, double>> pts;
  for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) pts.emplace_back(0.0, x);
  for (double x : {-1.0, 0.0, 1.0}) pts.emplace_back(0.5 * horizon, x);
  pts.emplace_back(0.25 * horizon, 0.0);
  return pts;
}

PdeCompareReport compare_pde_mc(const PdeProblem& problem, const PdeGrid& grid,
                                double horizon,
                                std::span<const std::pair<double, double>> points,
                                const PdeCompareOptions& options) {
  const double margin = 4.0 * problem.sigma_bound * std::sqrt(horizon);
  for (const auto& [t, x] : points) {
    if (x < grid.x_lo + margin || x > grid.x_hi - margin)
      throw std::invalid_argument("compare_pde_mc: sample point too close to the "
                                  "spatial boundary (margin 4 sigma sqrt(T))");
    if (t < 0.0 || t > horizon)
      throw std::invalid_argument("compare_pde_mc: sample time outside [0, T]");
  }
  const PdeSolution fd = fd_solve(problem, grid, horizon);

  PdeCompareReport report;
  report.pass = true;
  std::uint64_t point_index = 0;
  for (const auto& [t, x] : points) {
    FkOptions fk = options.fk;
    fk.seed = options.fk.seed + 1000 * point_index++;  // independent ensembles
    const FkResult mc = feynman_kac_u(t, x, problem, horizon, fk);
    PdePointReport row;
    row.t = t;
    row.x = x;
    row.u_fd = fd.interp(t, x);
    row.u_mc = mc.value;
    row.mc_se = mc.se;
    row.discrepancy = std::abs(row.u_fd - row.u_mc);
    row.budget = options.fd_truncation + 3.0 * mc.se;
    row.pass = row.discrepancy <= row.budget;
    report.max_discrepancy = std::max(report.max_discrepancy, row.discrepancy);
    report.pass = report.pass && row.pass;
    report.points.push_back(row);
  }
  return report;
}

GrowthCheck check_growth(std::span<const double> xs, std::span<const double> us,
                         double p) {
  if (xs.size() != us.size() || xs.empty())
    throw std::invalid_argument("check_growth: matching nonempty samples required");
  double span = 0.0;
  for (double x : xs) span = std::max(span, std::abs(x));
  GrowthCheck out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = std::abs(us[i]) / (1.0 + std::pow(std::abs(xs[i]), p));
    out.c_full = std::max(out.c_full, c);
    if (std::abs(xs[i]) <= (2.0 / 3.0) * span) out.c_base = std::max(out.c_base, c);
  }
  out.pass = std::isfinite(out.c_full) &&
             (out.c_full == 0.0 || out.c_full <= 2.0 * out.c_base);
  return out;
}

}  // namespace qbsde
