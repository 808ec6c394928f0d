#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "netspectra/graph.hpp"

namespace netspectra {

/// Average cluster mass <M_c(l)> over seeds, l = 0..l_max.
struct GrowthCurve {
  std::vector<double> masses;
  std::size_t n_seeds = 0;
  std::size_t n_nodes = 0;
  double saturation_mass = 0.0;  ///< masses.back()
};

/// M_c(l) for l = 0..l_max: nodes reachable from `seed` in at most l
/// outgoing hops, the seed included.
std::vector<std::uint64_t> cluster_mass(const DirectedGraph& g, NodeId seed, std::size_t l_max);

/// Mean of cluster_mass over every node as seed. Per-seed masses are summed
/// as integers, so the result is independent of the worker count.
GrowthCurve average_mass(const DirectedGraph& g, std::size_t l_max, std::size_t threads = 0);

struct DimensionFit {
  double d = 0.0;
  double stderr_d = 0.0;
  std::size_t l_lo = 0;
  std::size_t l_hi = 0;
  /// <M_c(l_hi)> exceeds half the network: the window reaches saturation.
  bool saturated = false;
};

/// OLS slope of ln <M_c> against ln l over l in [l_lo, l_hi].
DimensionFit dimension_fit(const GrowthCurve& curve, std::size_t l_lo, std::size_t l_hi);

struct UndirectedDimension {
  GrowthCurve curve;
  DimensionFit fit;
};

/// to_undirected -> average_mass -> dimension_fit.
UndirectedDimension undirected_dimension(const DirectedGraph& g, std::size_t l_max,
                                         std::size_t l_lo, std::size_t l_hi,
                                         std::size_t threads = 0);

/// Largest |<M_c(l)>(g) - <M_c(l)>(invert_links(g))| over l, with the
/// curve of the inverted graph.
struct InversionComparison {
  GrowthCurve inverted;
  double max_abs_difference = 0.0;
};
InversionComparison compare_inverted(const DirectedGraph& g, const GrowthCurve& forward,
                                     std::size_t threads = 0);

}  // namespace netspectra
