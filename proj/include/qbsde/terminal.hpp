// Terminal conditions xi: constants, Brownian functionals, functionals of the
// terminal state, plus the two-sided truncation xi+ ^ n - xi- ^ p.

#ifndef QBSDE_TERMINAL_HPP
#define QBSDE_TERMINAL_HPP

#include <string>
#include <vector>

#include "qbsde/ensemble.hpp"
#include "qbsde/math_util.hpp"

namespace qbsde {

enum class TerminalKind { Constant, Brownian, BrownianAbs, StateFunctional };
enum class StateFn { Identity, Abs, Square, Affine };

struct TerminalSpec {
  TerminalKind kind = TerminalKind::Brownian;
  double constant = 1.0;           // for Constant
  StateFn g = StateFn::Identity;   // for StateFunctional
  double g_scale = 1.0, g_shift = 0.0;  // Affine: scale * x + shift
  double growth_p = 1.0;           // exponent p in [1, 2)
  // Truncation indices: xi -> min(xi+, clip_pos) - min(xi-, clip_neg).
  double clip_pos = kInf;
  double clip_neg = kInf;
  // Constant shift applied after truncation (ordered comparison pairs).
  double offset = 0.0;

  void validate() const;  // throws naming the violated rule
  bool truncated() const { return clip_pos != kInf || clip_neg != kInf; }

  double eval_raw(double brownian_T, double state_T) const;
  double eval(double brownian_T, double state_T) const;  // with truncation

  std::string describe() const;
};

// Per-path xi on an ensemble (state kinds require simulated states).
std::vector<double> terminal_samples(const TerminalSpec& spec, const PathEnsemble& ens);

}  // namespace qbsde

#endif
