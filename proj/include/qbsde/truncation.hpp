// Grid-level analogue of the double-approximation scheme: the terminal is
// clipped to xi+ ^ n - xi- ^ p and alpha is switched off once its running
// integral reaches n. Monotone in n for fixed p and vice versa.

#ifndef QBSDE_TRUNCATION_HPP
#define QBSDE_TRUNCATION_HPP

#include <utility>

#include "qbsde/driver.hpp"
#include "qbsde/terminal.hpp"

namespace qbsde {

struct BsdeProblem {
  DriverSpec driver;
  TerminalSpec terminal;
};

// n, p >= 1; infinity sentinels leave the problem unchanged.
BsdeProblem build_truncated_problem(const DriverSpec& driver,
                                    const TerminalSpec& terminal, double n, double p);

}  // namespace qbsde

#endif
