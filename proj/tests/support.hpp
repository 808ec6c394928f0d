#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "netspectra/graph.hpp"
#include "netspectra/spectral.hpp"

namespace testing {

using netspectra::DirectedGraph;
using netspectra::Edge;
using netspectra::NodeId;

// Directed G(n, p) with p = mean_degree / n; self-loops allowed.
inline DirectedGraph random_graph(std::size_t n, double mean_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution link(std::min(1.0, mean_degree / static_cast<double>(n)));
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (link(rng)) edges.push_back({i, j});
    }
  }
  return DirectedGraph(n, std::move(edges));
}

inline std::vector<std::complex<double>> values_above(const netspectra::SpectrumResult& s,
                                                      double cutoff) {
  std::vector<std::complex<double>> v;
  for (const auto& p : s.pairs) {
    if (std::abs(p.value) > cutoff) v.push_back(p.value);
  }
  return v;
}

struct Matching {
  bool same_count = false;
  double worst = std::numeric_limits<double>::infinity();
};

// Greedy minimal-distance pairing of two multisets.
inline Matching greedy_match(std::vector<std::complex<double>> a,
                             std::vector<std::complex<double>> b) {
  Matching m;
  m.same_count = a.size() == b.size();
  if (!m.same_count) return m;
  m.worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = b.size();
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!used[k] && std::abs(b[k] - x) < best) {
        best = std::abs(b[k] - x);
        pick = k;
      }
    }
    if (pick == b.size()) return {false, best};
    used[pick] = true;
    m.worst = std::max(m.worst, best);
  }
  return m;
}

}  // namespace testing
