#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netspectra/google_matrix.hpp"
#include "netspectra/graph.hpp"

namespace netspectra {

using ComplexVector = std::vector<std::complex<double>>;

struct EigenPair {
  std::complex<double> value;
  /// Unit-norm right eigenvector; empty when not kept or not recoverable.
  ComplexVector vector;
  /// ||G psi - lambda psi|| for the stored vector, otherwise the residual of
  /// the Schur vector that certified the eigenvalue.
  double residual = 0.0;
};

enum class SpectrumStatus {
  complete,
  /// Ritz values above the cutoff remained unconverged when the search stopped.
  partial,
  /// The restart budget ran out while restarts were still adding pairs;
  /// counts (especially multiplicities) are lower bounds.
  lower_bound,
};

const char* to_string(SpectrumStatus status);

struct SpectrumResult {
  std::vector<EigenPair> pairs;  ///< descending |lambda|
  double lambda_min = 0.0;
  std::size_t n = 0;
  double alpha = 0.0;
  std::string source;
  std::string method;  ///< "arnoldi" or "dense"
  double tol = 0.0;
  SpectrumStatus status = SpectrumStatus::complete;
  std::size_t restarts = 0;
  /// Pairs whose eigenvector could not be recovered within tol (defective or
  /// ill-conditioned); their eigenvalue is still certified by a Schur vector.
  std::size_t missing_vectors = 0;

  bool has_vectors() const;
};

struct ArnoldiOptions {
  double lambda_min = 0.1;
  std::size_t krylov_dim = 600;
  double tol = 1e-8;
  /// Searches from fresh random start vectors (multiplicity hunting).
  std::size_t max_restarts = 64;
  /// Basis rebuilds allowed within one search before it is reported partial.
  std::size_t max_refinements = 200;
  std::uint64_t seed = 0;
  bool keep_vectors = true;
  /// Pairs closer than this in eigenvalue and with eigenvector overlap above
  /// `merge_overlap` are reported once.
  double merge_tol = 1e-8;
  double merge_overlap = 0.999;
};

/// Eigenpairs of G with |lambda| >= lambda_min by explicitly restarted
/// Arnoldi with locking.
///
/// Each restart starts from a random vector orthogonal to the locked
/// invariant subspace and builds an orthonormal Krylov basis (classical
/// Gram-Schmidt with one full reorthogonalization pass). Ritz pairs whose
/// residual estimate is within `tol` are locked as real Schur vectors (two
/// per complex pair); when wanted Ritz values remain unconverged the basis is
/// rebuilt from the leading unconverged Ritz vectors and projected afresh.
/// Later restarts search only the complement of the locked subspace and so
/// recover further copies of degenerate eigenvalues. The search stops when a
/// full restart locks nothing new. krylov_dim is capped at n; values below 2
/// are rejected (except for n == 1).
SpectrumResult arnoldi_spectrum(const GoogleOperator& op, const ArnoldiOptions& options = {});

/// Full dense eigendecomposition of G built entry by entry from the graph.
/// Verification oracle; throws SizeError for n > 2000.
SpectrumResult dense_spectrum(const DirectedGraph& g, double alpha);

/// Dense G = alpha * S + (1 - alpha) / N assembled directly from its definition.
Eigen::MatrixXd dense_google_matrix(const DirectedGraph& g, double alpha);
/// Dense S: column-normalized adjacency, dangling columns 1/N.
Eigen::MatrixXd dense_s_matrix(const DirectedGraph& g);

/// ||G psi - lambda psi||_2 / ||psi||_2. Throws ParameterError for psi = 0.
double residual(const GoogleOperator& op, std::complex<double> lambda,
                std::span<const std::complex<double>> psi);

/// Sorts by descending |lambda| (then ascending argument) and drops pairs
/// that duplicate an earlier one within `value_tol` and eigenvector overlap
/// above `overlap`. Pairs without vectors are never merged.
void sort_and_merge(SpectrumResult& spec, double value_tol, double overlap);

}  // namespace netspectra
