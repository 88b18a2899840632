// Seeded Brownian increments and forward-SDE states on a time grid.
// Increment (m, i, k) is a pure function of (seed, m, i, k), so ensembles
// are bit-reproducible and independent of generation order.

#ifndef QBSDE_ENSEMBLE_HPP
#define QBSDE_ENSEMBLE_HPP

#include <cstdint>
#include <vector>

#include "qbsde/time_grid.hpp"

namespace qbsde {

struct PathEnsemble {
  std::uint64_t seed = 0;
  TimeGrid grid;
  int paths = 0;  // M
  int dim = 1;    // d (Brownian dimension)

  double start_time = 0.0;  // t0; states are frozen at start_state before t0
  double start_state = 0.0; // x0 (scalar state, n = 1)

  // sqrt(dt)-scaled standard normals, layout (m * N + i) * d + k.
  std::vector<double> increments;
  // X values, layout m * (N + 1) + i; empty until an SDE is simulated.
  std::vector<double> states;

  bool has_states() const { return !states.empty(); }

  double increment(int m, int i, int k = 0) const {
    return increments[(static_cast<std::size_t>(m) * grid.steps + i) * dim + k];
  }
  double state(int m, int i) const {
    return states[static_cast<std::size_t>(m) * (grid.steps + 1) + i];
  }
  // B_{t_i} along coordinate k (cumulative sum of increments).
  double brownian(int m, int i, int k = 0) const {
    double b = 0.0;
    for (int j = 0; j < i; ++j) b += increment(m, j, k);
    return b;
  }
};

PathEnsemble simulate_brownian(const TimeGrid& grid, int paths, int dim,
                               std::uint64_t seed);

// Per-path Brownian terminal values B_T (coordinate k).
std::vector<double> brownian_terminal(const PathEnsemble& ens, int k = 0);

// Coarse ensemble on N/factor steps whose increments are group sums of the
// fine ones; the underlying Brownian paths (hence B_T) are unchanged.
// States are dropped.
PathEnsemble coarsen(const PathEnsemble& ens, int factor);

}  // namespace qbsde

#endif
