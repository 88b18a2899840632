// Statistical experiments that turn the comparison, stability and
// monotone-approximation statements into pass/fail certificates.
// Every certificate stores the values, standard errors and seeds needed
// to recompute it bit-identically.

#ifndef QBSDE_THEOREM_LAB_HPP
#define QBSDE_THEOREM_LAB_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qbsde/characteristics.hpp"
#include "qbsde/cole_hopf.hpp"
#include "qbsde/lsmc.hpp"
#include "qbsde/truncation.hpp"

namespace qbsde {

struct BoundCertificate {
  std::string label;
  double statistic = 0.0;
  double bound = 0.0;
  double se = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  double theta_or_n = 0.0;
  bool pass = false;
  bool overflow = false;
  std::uint64_t seed = 0;
  std::string note;
};

// ---------------------------------------------------------------------------
// Solver reproducibility floors.

struct NoiseFloorOptions {
  int resolves = 5;
  double subsample_fraction = 0.5;
};

struct NoiseFloor {
  double y0_range = 0.0;        // max - min of Y0 across re-solves
  double cell_max = 0.0;        // max |Y difference| over all (layer, path) cells
  std::vector<double> y0_values;
};

NoiseFloor solver_noise_floor(const BsdeProblem& problem, const PathEnsemble& ens,
                              const RegressionBasis& basis, const PicardConfig& picard,
                              const NoiseFloorOptions& options = {},
                              bool track_cells = false);

// ---------------------------------------------------------------------------
// A priori estimate check (terminal-time closed comparison plus a pathwise
// regression comparison at interior nodes).

struct AprioriCheckOptions {
  double interior_slack = 0.05;     // relative slack per cell
  double violation_budget = 1e-3;   // tolerated fraction of violating cells
  int layer_stride = 1;
};

BoundCertificate check_apriori(const BsdeSolution& sol, const AssumptionParams& params,
                               std::span<const double> xi, const PathEnsemble& ens,
                               const RegressionBasis& basis,
                               const AprioriCheckOptions& options = {});

// ---------------------------------------------------------------------------
// Theta-difference certificate: the convexity bound for Y - theta Y' with
// c(theta) = gamma e^{beta T} / (1 - theta). Both sides are compared on the
// exponent (log) scale, which keeps theta near 1 representable; overflow of
// a per-path exponent raises OverflowError naming theta.

BoundCertificate theta_gap_certificate(const BsdeSolution& sol,
                                       const BsdeSolution& sol_prime,
                                       const DriverSpec& f, const DriverSpec& f_prime,
                                       std::span<const double> xi,
                                       std::span<const double> xi_prime,
                                       const PathEnsemble& ens, double theta,
                                       double t = 0.0);

// ---------------------------------------------------------------------------
// Comparison experiment.

struct ComparisonOptions {
  std::vector<double> theta_list = {0.5, 0.9, 0.99};
  double order_tol = 1e-9;       // sampled f <= f' and pathwise xi <= xi'
  std::int64_t certify_budget = 4000;
  double cell_tolerance = 0.0;   // 0: use 3x the cell noise floor
  NoiseFloorOptions noise;
};

struct ComparisonReport {
  double max_gap = 0.0;             // max over cells of Y - Y'
  double violation_fraction = 0.0;  // cells beyond tolerance
  double tolerance = 0.0;
  double noise_cell_floor = 0.0;
  std::vector<BoundCertificate> theta_certs;
  bool order_pass = false;
  bool pass = false;
};

ComparisonReport run_comparison_experiment(const BsdeProblem& problem,
                                           const BsdeProblem& problem_prime,
                                           const PathEnsemble& ens,
                                           const RegressionBasis& basis,
                                           const PicardConfig& picard,
                                           const ComparisonOptions& options = {});

// ---------------------------------------------------------------------------
// Stability experiment.

struct StabilityOptions {
  std::vector<double> p_list = {1.0, 2.0};
  double conv_lambda = 1.0;  // exponential-moment proxy order
};

struct StabilityEntry {
  double n = 0.0;
  std::vector<double> e_p;   // E[exp(p sup|Y^n - Y|)] - 1 per p
  std::vector<double> z_p;   // E[(int |Z^n - Z|^2)^{p/2}] per p
  double conv_moment_log = 0.0;  // log E[e^{lambda (|xi_n| + |alpha_n|_1)}]
};

struct StabilityReport {
  std::vector<double> p_list;
  std::vector<StabilityEntry> entries;
  double target_conv_moment_log = 0.0;
  bool e_monotone = false;  // strictly decreasing in n for every p
  bool z_monotone = false;
  bool pass = false;
};

using SequenceBuilder = std::function<BsdeProblem(double n)>;

StabilityReport run_stability_experiment(const BsdeProblem& target,
                                         const SequenceBuilder& builder,
                                         std::span<const double> n_list,
                                         const PathEnsemble& ens,
                                         const RegressionBasis& basis,
                                         const PicardConfig& picard,
                                         const StabilityOptions& options = {});

// Error statistics between two solutions on a shared ensemble.
struct PairErrorStats {
  double e = 0.0;
  double z = 0.0;
};
PairErrorStats solution_error_stats(const BsdeSolution& a, const BsdeSolution& b,
                                    double p);

// ---------------------------------------------------------------------------
// Monotone approximation experiment (nonnegative xi and f).

struct MonotoneOptions {
  NoiseFloorOptions noise;
  std::int64_t certify_budget = 4000;
};

struct MonotoneReport {
  std::vector<double> n_values;
  std::vector<double> y0;
  double y0_untruncated = 0.0;
  double noise_floor = 0.0;
  double final_gap = 0.0;
  bool nondecreasing = false;
  bool pass = false;
};

MonotoneReport run_monotone_approximation(const BsdeProblem& problem,
                                          std::span<const double> n_list,
                                          const PathEnsemble& ens,
                                          const RegressionBasis& basis,
                                          const PicardConfig& picard,
                                          const MonotoneOptions& options = {});

// ---------------------------------------------------------------------------
// Moment estimate (the p-th order bound with unspecified constant): the
// statistic-to-bound ratio is the testable surrogate.

struct MomentRatio {
  double p = 0.0;
  double statistic_log = 0.0;  // log E[exp(gamma p sup|Y|) + (int |Z|^2)^{p/2}]
  double bound_side_log = 0.0; // log E[exp(p gamma (|xi| + |alpha|_1))]
  double ratio = 0.0;
};

MomentRatio moment_ratio(const BsdeSolution& sol, double gamma, double p,
                         std::span<const double> xi, double alpha_mass);

// ---------------------------------------------------------------------------
// Randomized certified problems for batch experiments (deterministic per
// (seed, index)).

BsdeProblem random_certified_problem(std::uint64_t seed, std::uint64_t index,
                                     double horizon = 1.0);
std::pair<BsdeProblem, BsdeProblem> random_ordered_pair(std::uint64_t seed,
                                                        std::uint64_t index,
                                                        double horizon = 1.0);

}  // namespace qbsde

#endif
