#ifndef QBSDE_TIME_GRID_HPP
#define QBSDE_TIME_GRID_HPP

#include <cmath>
#include <stdexcept>

namespace qbsde {

// Uniform grid t_i = i T / N on [0, T].
struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double T, int N) : horizon(T), steps(N) {
    if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon T > 0");
    if (N < 1) throw std::invalid_argument("TimeGrid: steps N >= 1");
  }

  double dt() const { return horizon / steps; }
  double node(int i) const { return horizon * static_cast<double>(i) / steps; }

  // Index of a grid node; throws if t is not a node (relative tol 1e-9).
  int index_of(double t) const {
    const double pos = t / dt();
    const int i = static_cast<int>(std::lround(pos));
    if (i < 0 || i > steps || std::abs(pos - i) > 1e-9 * (steps + 1))
      throw std::invalid_argument("time is not a grid node");
    return i;
  }
};

}  // namespace qbsde

#endif
