#include "qbsde/terminal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbsde {

void TerminalSpec::validate() const {
  if (!(growth_p >= 1.0 && growth_p < 2.0))
    throw std::invalid_argument("terminal: growth exponent p in [1, 2) violated");
  if (!(clip_pos >= 1.0)) throw std::invalid_argument("terminal: clip_pos >= 1 violated");
  if (!(clip_neg >= 1.0)) throw std::invalid_argument("terminal: clip_neg >= 1 violated");
}

double TerminalSpec::eval_raw(double brownian_T, double state_T) const {
  switch (kind) {
    case TerminalKind::Constant: return constant;
    case TerminalKind::Brownian: return brownian_T;
    case TerminalKind::BrownianAbs: return std::abs(brownian_T);
    case TerminalKind::StateFunctional:
      switch (g) {
        case StateFn::Identity: return state_T;
        case StateFn::Abs: return std::abs(state_T);
        case StateFn::Square: return state_T * state_T;
        case StateFn::Affine: return g_scale * state_T + g_shift;
      }
  }
  return 0.0;
}

double TerminalSpec::eval(double brownian_T, double state_T) const {
  const double xi = eval_raw(brownian_T, state_T);
  const double pos = std::min(std::max(xi, 0.0), clip_pos);
  const double neg = std::min(std::max(-xi, 0.0), clip_neg);
  return pos - neg + offset;
}

std::string TerminalSpec::describe() const {
  std::string base;
  switch (kind) {
    case TerminalKind::Constant: base = "constant"; break;
    case TerminalKind::Brownian: base = "B_T"; break;
    case TerminalKind::BrownianAbs: base = "|B_T|"; break;
    case TerminalKind::StateFunctional: base = "g(X_T)"; break;
  }
  if (truncated()) base += " (truncated)";
  return base;
}

std::vector<double> terminal_samples(const TerminalSpec& spec, const PathEnsemble& ens) {
  spec.validate();
  const bool needs_state = spec.kind == TerminalKind::StateFunctional;
  if (needs_state && !ens.has_states())
    throw std::invalid_argument("terminal: state functional needs simulated states");
  std::vector<double> xi(static_cast<std::size_t>(ens.paths));
  const std::vector<double> bt =
      spec.kind == TerminalKind::Constant ? std::vector<double>() : brownian_terminal(ens);
  for (int m = 0; m < ens.paths; ++m) {
    const double b = bt.empty() ? 0.0 : bt[static_cast<std::size_t>(m)];
    const double x = needs_state ? ens.state(m, ens.grid.steps) : 0.0;
    xi[static_cast<std::size_t>(m)] = spec.eval(b, x);
  }
  return xi;
}

}  // namespace qbsde
