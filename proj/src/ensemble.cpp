#include "qbsde/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "qbsde/rng.hpp"

namespace qbsde {

PathEnsemble simulate_brownian(const TimeGrid& grid, int paths, int dim,
                               std::uint64_t seed) {
  if (paths < 1) throw std::invalid_argument("simulate_brownian: paths >= 1");
  if (dim < 1) throw std::invalid_argument("simulate_brownian: dim >= 1");
  PathEnsemble ens;
  ens.seed = seed;
  ens.grid = grid;
  ens.paths = paths;
  ens.dim = dim;
  ens.increments.resize(static_cast<std::size_t>(paths) * grid.steps * dim);

  const CounterRng rng(seed, RngStream::Brownian);
  const double scale = std::sqrt(grid.dt());
  const int blocks = (dim + 1) / 2;
  for (int m = 0; m < paths; ++m) {
    for (int i = 0; i < grid.steps; ++i) {
      double* out = &ens.increments[(static_cast<std::size_t>(m) * grid.steps + i) * dim];
      for (int b = 0; b < blocks; ++b) {
        const auto pair = rng.normal_pair(static_cast<std::uint64_t>(m),
                                          static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(b));
        out[2 * b] = scale * pair[0];
        if (2 * b + 1 < dim) out[2 * b + 1] = scale * pair[1];
      }
    }
  }
  return ens;
}

std::vector<double> brownian_terminal(const PathEnsemble& ens, int k) {
  std::vector<double> bt(static_cast<std::size_t>(ens.paths));
  for (int m = 0; m < ens.paths; ++m) {
    double b = 0.0;
    for (int i = 0; i < ens.grid.steps; ++i) b += ens.increment(m, i, k);
    bt[static_cast<std::size_t>(m)] = b;
  }
  return bt;
}

PathEnsemble coarsen(const PathEnsemble& ens, int factor) {
  if (factor < 1 || ens.grid.steps % factor != 0)
    throw std::invalid_argument("coarsen: factor must divide the step count");
  PathEnsemble out;
  out.seed = ens.seed;
  out.grid = TimeGrid(ens.grid.horizon, ens.grid.steps / factor);
  out.paths = ens.paths;
  out.dim = ens.dim;
  out.start_time = ens.start_time;
  out.start_state = ens.start_state;
  out.increments.resize(static_cast<std::size_t>(ens.paths) * out.grid.steps * ens.dim);
  for (int m = 0; m < ens.paths; ++m) {
    for (int i = 0; i < out.grid.steps; ++i) {
      for (int k = 0; k < ens.dim; ++k) {
        double s = 0.0;
        for (int j = 0; j < factor; ++j) s += ens.increment(m, i * factor + j, k);
        out.increments[(static_cast<std::size_t>(m) * out.grid.steps + i) * ens.dim + k] = s;
      }
    }
  }
  return out;
}

}  // namespace qbsde
