#include "qbsde/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbsde {

BsdeProblem build_truncated_problem(const DriverSpec& driver,
                                    const TerminalSpec& terminal, double n, double p) {
  if (!(n >= 1.0) || !(p >= 1.0))
    throw std::invalid_argument("truncation: indices n, p >= 1 required");
  TerminalSpec cut = terminal;
  cut.clip_pos = std::min(terminal.clip_pos, n);
  cut.clip_neg = std::min(terminal.clip_neg, p);
  DriverSpec d = std::isinf(n)
                     ? driver
                     : driver.with_alpha(driver.params().alpha.truncated_at_budget(n));
  return BsdeProblem{std::move(d), cut};
}

}  // namespace qbsde
