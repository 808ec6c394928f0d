#include "netspectra/fracdim.hpp"

#include <algorithm>
#include <cmath>

#include "netspectra/error.hpp"
#include "netspectra/parallel.hpp"
#include "netspectra/regression.hpp"

namespace netspectra {

namespace {

// Level-synchronous BFS reusing caller-owned scratch; `stamp` marks visits
// so the visited array never needs clearing between seeds.
class Explorer {
 public:
  explicit Explorer(std::size_t n) : visited_(n, 0) {}

  void run(const DirectedGraph& g, NodeId seed, std::size_t l_max,
           std::vector<std::uint64_t>& mass) {
    if (++stamp_ == 0) {
      std::fill(visited_.begin(), visited_.end(), 0);
      stamp_ = 1;
    }
    mass.assign(l_max + 1, 1);
    frontier_.assign(1, seed);
    visited_[seed] = stamp_;
    std::uint64_t total = 1;
    for (std::size_t l = 1; l <= l_max; ++l) {
      next_.clear();
      for (NodeId u : frontier_) {
        for (NodeId v : g.out(u)) {
          if (visited_[v] != stamp_) {
            visited_[v] = stamp_;
            next_.push_back(v);
          }
        }
      }
      total += next_.size();
      mass[l] = total;
      if (next_.empty()) {
        std::fill(mass.begin() + static_cast<std::ptrdiff_t>(l), mass.end(), total);
        break;
      }
      frontier_.swap(next_);
    }
  }

 private:
  std::vector<std::uint32_t> visited_;
  std::uint32_t stamp_ = 0;
  std::vector<NodeId> frontier_, next_;
};

}  // namespace

std::vector<std::uint64_t> cluster_mass(const DirectedGraph& g, NodeId seed, std::size_t l_max) {
  if (seed >= g.size()) throw ParameterError("seed out of range");
  Explorer explorer(g.size());
  std::vector<std::uint64_t> mass;
  explorer.run(g, seed, l_max, mass);
  return mass;
}

GrowthCurve average_mass(const DirectedGraph& g, std::size_t l_max, std::size_t threads) {
  if (l_max < 1) throw ParameterError("l_max must be at least 1");
  if (g.empty()) throw ParameterError("graph has no nodes");
  const std::size_t n = g.size();
  const std::size_t workers = std::max<std::size_t>(1, threads ? threads : thread_count());
  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(l_max + 1, 0));
  parallel_chunks(n, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    Explorer explorer(n);
    std::vector<std::uint64_t> mass;
    auto& sums = partial[w];
    for (std::size_t s = begin; s < end; ++s) {
      explorer.run(g, static_cast<NodeId>(s), l_max, mass);
      for (std::size_t l = 0; l <= l_max; ++l) sums[l] += mass[l];
    }
  });
  GrowthCurve curve;
  curve.n_seeds = n;
  curve.n_nodes = n;
  curve.masses.assign(l_max + 1, 0.0);
  for (std::size_t l = 0; l <= l_max; ++l) {
    std::uint64_t total = 0;
    for (const auto& sums : partial) total += sums[l];
    curve.masses[l] = static_cast<double>(total) / static_cast<double>(n);
  }
  curve.saturation_mass = curve.masses.back();
  return curve;
}

DimensionFit dimension_fit(const GrowthCurve& curve, std::size_t l_lo, std::size_t l_hi) {
  if (l_lo < 1) throw ParameterError("fit window must start at l >= 1");
  if (curve.masses.empty() || l_hi >= curve.masses.size()) {
    throw ParameterError("fit window exceeds l_max");
  }
  if (l_hi < l_lo + 1) throw DataError("fit window needs at least two points");
  std::vector<double> x, y;
  for (std::size_t l = l_lo; l <= l_hi; ++l) {
    x.push_back(std::log(static_cast<double>(l)));
    y.push_back(std::log(curve.masses[l]));
  }
  const LineFit line = fit_line(x, y);
  DimensionFit fit;
  fit.d = line.slope;
  fit.stderr_d = line.slope_stderr;
  fit.l_lo = l_lo;
  fit.l_hi = l_hi;
  fit.saturated = curve.masses[l_hi] > 0.5 * static_cast<double>(curve.n_nodes);
  return fit;
}

UndirectedDimension undirected_dimension(const DirectedGraph& g, std::size_t l_max,
                                         std::size_t l_lo, std::size_t l_hi,
                                         std::size_t threads) {
  UndirectedDimension result;
  result.curve = average_mass(to_undirected(g), l_max, threads);
  result.fit = dimension_fit(result.curve, l_lo, l_hi);
  return result;
}

InversionComparison compare_inverted(const DirectedGraph& g, const GrowthCurve& forward,
                                     std::size_t threads) {
  InversionComparison cmp;
  cmp.inverted = average_mass(invert_links(g), forward.masses.size() - 1, threads);
  for (std::size_t l = 0; l < forward.masses.size(); ++l) {
    cmp.max_abs_difference =
        std::max(cmp.max_abs_difference, std::abs(forward.masses[l] - cmp.inverted.masses[l]));
  }
  return cmp;
}

}  // namespace netspectra
