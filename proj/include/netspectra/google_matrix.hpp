#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "netspectra/error.hpp"
#include "netspectra/graph.hpp"

namespace netspectra {

/// Matrix-free Google matrix G = alpha * S + (1 - alpha) / N.
///
/// S normalizes every column j of the adjacency matrix (links j -> i) by
/// outdeg(j); columns of dangling nodes are uniform 1/N. Dangling columns are
/// never materialized: apply() folds them in as a rank-one term.
class GoogleOperator {
 public:
  GoogleOperator(const DirectedGraph& g, double alpha);

  double alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return n_; }
  const std::vector<NodeId>& dangling() const noexcept { return dangling_; }

  /// Weight S_ij for a non-dangling column j (1 / outdeg(j)), 0 for dangling.
  double column_weight(NodeId j) const { return inv_outdeg_[j]; }
  /// Sources j with a link j -> i.
  std::span<const NodeId> in_links(NodeId i) const {
    return {sources_.data() + row_offsets_[i], sources_.data() + row_offsets_[i + 1]};
  }

  /// out = G * v. Rows are independent; the result does not depend on the
  /// worker count.
  void apply(std::span<const double> v, std::span<double> out) const;
  void apply(std::span<const std::complex<double>> v,
             std::span<std::complex<double>> out) const;

  std::vector<double> apply(std::span<const double> v) const;
  std::vector<std::complex<double>> apply(std::span<const std::complex<double>> v) const;

 private:
  template <typename T>
  void apply_impl(std::span<const T> v, std::span<T> out) const;

  double alpha_;
  std::size_t n_;
  std::vector<std::size_t> row_offsets_;
  std::vector<NodeId> sources_;
  std::vector<double> inv_outdeg_;
  std::vector<NodeId> dangling_;
};

/// Builds the operator; throws ParameterError unless 0 < alpha < 1 and g is nonempty.
GoogleOperator build_operator(const DirectedGraph& g, double alpha);

struct PageRankVector {
  std::vector<double> probabilities;
  double residual = 0.0;  ///< L1 change of the last iteration
  std::size_t iterations = 0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, PageRankVector last)
      : Error(what), last_(std::move(last)) {}
  const PageRankVector& last_iterate() const noexcept { return last_; }

 private:
  PageRankVector last_;
};

/// Power iteration p <- G p from the uniform vector until the L1 change
/// drops below `tol`.
PageRankVector pagerank(const GoogleOperator& op, double tol = 1e-12,
                        std::size_t max_iter = 10000);

/// Node indices by descending probability, ties by ascending index.
std::vector<NodeId> order_by_pagerank(const PageRankVector& p);

}  // namespace netspectra
