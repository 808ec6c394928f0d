#include "netspectra/eigenstates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netspectra/error.hpp"

namespace netspectra {

double participation_ratio(std::span<const std::complex<double>> psi) {
  double s2 = 0.0, s4 = 0.0;
  for (const auto& x : psi) {
    const double p = std::norm(x);
    s2 += p;
    s4 += p * p;
  }
  if (!(s4 > 0.0)) throw ParameterError("participation ratio of a zero vector");
  return s2 * s2 / s4;
}

namespace {

// Consecutive runs (in spectrum order) of pairs whose eigenvalues agree within tol.
std::vector<std::vector<std::size_t>> clusters(const SpectrumResult& spec, double tol) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> taken(spec.pairs.size(), false);
  for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
    if (taken[i]) continue;
    std::vector<std::size_t> group{i};
    taken[i] = true;
    for (std::size_t j = i + 1; j < spec.pairs.size(); ++j) {
      if (std::abs(spec.pairs[j].value) < std::abs(spec.pairs[i].value) - tol) break;
      if (!taken[j] && std::abs(spec.pairs[j].value - spec.pairs[i].value) <= tol) {
        group.push_back(j);
        taken[j] = true;
      }
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

void require_vectors(const SpectrumResult& spec) {
  if (!spec.has_vectors()) throw DataError("spectrum carries no eigenvectors");
}

void check_order(std::span<const NodeId> order, std::size_t n) {
  if (order.size() != n) throw ParameterError("order length does not match the spectrum size");
  std::vector<bool> seen(n, false);
  for (NodeId v : order) {
    if (v >= n || seen[v]) throw ParameterError("order is not a permutation");
    seen[v] = true;
  }
}

CoarseGrid build_grid(const SpectrumResult& spec, std::span<const NodeId> order,
                      std::size_t cell_size, std::size_t n_cells, std::size_t window,
                      std::size_t max_states) {
  CoarseGrid grid;
  grid.cell_size = cell_size;
  grid.n_cells = n_cells;
  const auto rows = cluster_representatives(spec, max_states);
  grid.n_states = rows.size();
  grid.values.assign(rows.size() * n_cells, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& pair = spec.pairs[rows[r]];
    grid.values_lambda.push_back(pair.value);
    double total = 0.0;
    for (const auto& x : pair.vector) total += std::norm(x);
    for (std::size_t rank = 0; rank < window; ++rank) {
      grid.values[r * n_cells + rank / cell_size] += std::norm(pair.vector[order[rank]]) / total;
    }
  }
  return grid;
}

}  // namespace

ParProfile par_profile(const SpectrumResult& spec, double cluster_tol) {
  require_vectors(spec);
  ParProfile profile;
  double sum = 0.0;
  for (const auto& p : spec.pairs) {
    if (p.vector.empty()) continue;
    const double xi = participation_ratio(p.vector);
    profile.entries.push_back({p.value, xi});
    sum += xi;
  }
  profile.mean_all = sum / static_cast<double>(profile.entries.size());

  const auto reps = cluster_representatives(spec, spec.pairs.size(), cluster_tol);
  double rep_sum = 0.0;
  for (std::size_t i : reps) rep_sum += participation_ratio(spec.pairs[i].vector);
  profile.mean_representatives = reps.empty() ? 0.0 : rep_sum / static_cast<double>(reps.size());
  return profile;
}

std::vector<std::size_t> cluster_representatives(const SpectrumResult& spec,
                                                 std::size_t max_states, double cluster_tol) {
  std::vector<std::size_t> reps;
  for (const auto& group : clusters(spec, cluster_tol)) {
    if (reps.size() >= max_states) break;
    std::size_t best = spec.pairs.size();
    for (std::size_t i : group) {
      if (spec.pairs[i].vector.empty()) continue;
      if (best == spec.pairs.size() || spec.pairs[i].residual < spec.pairs[best].residual) best = i;
    }
    if (best != spec.pairs.size()) reps.push_back(best);
  }
  return reps;
}

CoarseGrid coarse_grain(const SpectrumResult& spec, std::span<const NodeId> order,
                        std::size_t n_cells, std::size_t max_states) {
  require_vectors(spec);
  const std::size_t n = spec.n;
  check_order(order, n);
  if (n_cells < 1 || n_cells > n) throw ParameterError("n_cells must lie in [1, n]");
  const std::size_t cell_size = (n + n_cells - 1) / n_cells;
  const std::size_t cells = (n + cell_size - 1) / cell_size;
  return build_grid(spec, order, cell_size, cells, n, max_states);
}

CoarseGrid zoom_grid(const SpectrumResult& spec, std::span<const NodeId> order,
                     std::size_t first_cells, std::size_t cell_size, std::size_t max_states) {
  require_vectors(spec);
  const std::size_t n = spec.n;
  check_order(order, n);
  if (first_cells < 1 || cell_size < 1) throw ParameterError("zoom geometry must be positive");
  if (first_cells * cell_size > n) throw ParameterError("zoom window exceeds the network size");
  return build_grid(spec, order, cell_size, first_cells, first_cells * cell_size, max_states);
}

}  // namespace netspectra
