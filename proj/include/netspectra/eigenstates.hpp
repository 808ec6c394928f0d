#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "netspectra/graph.hpp"
#include "netspectra/spectral.hpp"

namespace netspectra {

/// xi = (sum |psi_j|^2)^2 / sum |psi_j|^4. Throws ParameterError for psi = 0.
double participation_ratio(std::span<const std::complex<double>> psi);

struct ParEntry {
  std::complex<double> value;
  double xi = 0.0;
};

struct ParProfile {
  std::vector<ParEntry> entries;  ///< one per eigenpair, spectrum order
  double mean_all = 0.0;          ///< mean over every eigenpair
  /// Mean over one representative per degenerate cluster.
  double mean_representatives = 0.0;
};

/// Throws DataError when the spectrum carries no eigenvectors. Pairs without
/// a vector are skipped.
ParProfile par_profile(const SpectrumResult& spec, double cluster_tol = 1e-8);

/// Probability mass per (state, cell), rows ordered by descending |lambda|.
struct CoarseGrid {
  std::size_t n_states = 0;
  std::size_t n_cells = 0;
  std::size_t cell_size = 0;
  std::vector<std::complex<double>> values_lambda;  ///< eigenvalue of each row
  std::vector<double> values;                       ///< row-major n_states x n_cells

  double at(std::size_t state, std::size_t cell) const { return values[state * n_cells + cell]; }
};

/// Indices into spec.pairs of one representative per degenerate cluster
/// (smallest residual among members carrying a vector), descending |lambda|,
/// at most `max_states`.
std::vector<std::size_t> cluster_representatives(const SpectrumResult& spec,
                                                 std::size_t max_states,
                                                 double cluster_tol = 1e-8);

/// Each row: |psi|^2 normalized to 1, positions permuted by `order`
/// (order[r] is the node at rank r), summed into consecutive cells of
/// ceil(n / n_cells) sites. The cell count is ceil(n / cell_size), which
/// equals n_cells whenever the final cell is non-empty.
CoarseGrid coarse_grain(const SpectrumResult& spec, std::span<const NodeId> order,
                        std::size_t n_cells = 307, std::size_t max_states = 64);

/// Raw (not re-normalized) masses over the leading first_cells * cell_size
/// ranks in `order`.
CoarseGrid zoom_grid(const SpectrumResult& spec, std::span<const NodeId> order,
                     std::size_t first_cells, std::size_t cell_size,
                     std::size_t max_states = 64);

}  // namespace netspectra
