#include "netspectra/google_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netspectra/parallel.hpp"

namespace netspectra {

namespace {
// Below this size thread start-up costs more than the matvec.
constexpr std::size_t parallel_threshold = 1 << 16;
}  // namespace

GoogleOperator::GoogleOperator(const DirectedGraph& g, double alpha)
    : alpha_(alpha), n_(g.size()) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("alpha must lie strictly inside (0, 1)");
  }
  if (g.empty()) throw ParameterError("graph has no nodes");

  inv_outdeg_.assign(n_, 0.0);
  row_offsets_.assign(n_ + 1, 0);
  for (NodeId j = 0; j < n_; ++j) {
    const std::size_t d = g.out_degree(j);
    if (d == 0) {
      dangling_.push_back(j);
    } else {
      inv_outdeg_[j] = 1.0 / static_cast<double>(d);
    }
    for (NodeId i : g.out(j)) ++row_offsets_[i + 1];
  }
  for (std::size_t i = 0; i < n_; ++i) row_offsets_[i + 1] += row_offsets_[i];
  sources_.resize(g.edge_count());
  std::vector<std::size_t> fill(row_offsets_.begin(), row_offsets_.end() - 1);
  for (NodeId j = 0; j < n_; ++j) {
    for (NodeId i : g.out(j)) sources_[fill[i]++] = j;
  }
}

template <typename T>
void GoogleOperator::apply_impl(std::span<const T> v, std::span<T> out) const {
  if (v.size() != n_ || out.size() != n_) {
    throw ParameterError("vector length does not match operator dimension");
  }
  T total{};
  for (const T& x : v) total += x;
  T dangling_total{};
  for (NodeId j : dangling_) dangling_total += v[j];
  const double inv_n = 1.0 / static_cast<double>(n_);
  const T uniform = (alpha_ * inv_n) * dangling_total + ((1.0 - alpha_) * inv_n) * total;

  auto rows = [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      T acc{};
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        const NodeId j = sources_[k];
        acc += inv_outdeg_[j] * v[j];
      }
      out[i] = alpha_ * acc + uniform;
    }
  };
  if (n_ >= parallel_threshold) {
    parallel_chunks(n_, thread_count(), rows);
  } else {
    rows(0, 0, n_);
  }
}

void GoogleOperator::apply(std::span<const double> v, std::span<double> out) const {
  apply_impl<double>(v, out);
}

void GoogleOperator::apply(std::span<const std::complex<double>> v,
                           std::span<std::complex<double>> out) const {
  apply_impl<std::complex<double>>(v, out);
}

std::vector<double> GoogleOperator::apply(std::span<const double> v) const {
  std::vector<double> out(n_);
  apply(v, std::span<double>(out));
  return out;
}

std::vector<std::complex<double>> GoogleOperator::apply(
    std::span<const std::complex<double>> v) const {
  std::vector<std::complex<double>> out(n_);
  apply(v, std::span<std::complex<double>>(out));
  return out;
}

GoogleOperator build_operator(const DirectedGraph& g, double alpha) {
  return GoogleOperator(g, alpha);
}

PageRankVector pagerank(const GoogleOperator& op, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw ParameterError("pagerank tolerance must be positive");
  const std::size_t n = op.size();
  PageRankVector result;
  result.probabilities.assign(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    op.apply(std::span<const double>(result.probabilities), std::span<double>(next));
    // Renormalize to absorb rounding drift; G preserves the sum exactly in exact arithmetic.
    const double sum = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= sum;
      change += std::abs(next[i] - result.probabilities[i]);
    }
    result.probabilities.swap(next);
    result.residual = change;
    result.iterations = it;
    if (!std::isfinite(change)) throw NumericalError("non-finite PageRank iterate");
    if (change < tol) return result;
  }
  throw ConvergenceError("PageRank did not converge in " + std::to_string(max_iter) +
                             " iterations (residual " + std::to_string(result.residual) + ")",
                         std::move(result));
}

std::vector<NodeId> order_by_pagerank(const PageRankVector& p) {
  std::vector<NodeId> order(p.probabilities.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return p.probabilities[a] > p.probabilities[b];
  });
  return order;
}

}  // namespace netspectra
