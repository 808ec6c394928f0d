#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace netspectra::detail {

/// Diagonal block of a quasi-upper-triangular matrix: 1x1 for a real
/// eigenvalue, 2x2 for a complex-conjugate pair.
struct Block {
  std::size_t start = 0;
  std::size_t size = 1;
};

struct RealSchur {
  Eigen::MatrixXd T;  ///< quasi-upper-triangular
  Eigen::MatrixXd Z;  ///< orthogonal, input = Z * T * Z^T
  std::vector<Block> blocks;
};

/// Real Schur form of an upper Hessenberg matrix by Francis double-shift QR
/// with Wilkinson/ad hoc exceptional shifts. Entries below the subdiagonal
/// are ignored. Throws NumericalError if the iteration stalls.
RealSchur hessenberg_schur(Eigen::MatrixXd H);

/// Real Schur form of a general square matrix: Householder reduction to
/// Hessenberg form followed by hessenberg_schur.
RealSchur general_schur(Eigen::MatrixXd A);

/// Swaps the adjacent diagonal blocks `b` and `b + 1` by an orthogonal
/// similarity, updating T, Z and the block list. Returns false, leaving the
/// form untouched, when the swap would not be backward stable (for example
/// equal eigenvalues).
bool swap_adjacent_blocks(RealSchur& s, std::size_t b);

/// Moves the listed blocks (indices into s.blocks at call time) to the
/// front in the listed order. Returns how many were placed; stops at the
/// first unstable swap.
std::size_t move_to_front(RealSchur& s, const std::vector<std::size_t>& selection);

/// Eigenvalues of a diagonal block; for a 2x2 complex block the first entry
/// has positive imaginary part. For 1x1 blocks both entries are equal.
std::array<std::complex<double>, 2> block_eigenvalues(const Eigen::MatrixXd& T, const Block& b);

/// Solves (T[0:m, 0:m] - mu I) z = rhs by block back-substitution. `m` must
/// be a block boundary. Pivots (1x1) or blocks (2x2) whose smallest singular
/// value is at most `singular_tol` are treated as exactly singular and solved
/// in the minimum-norm sense (the free component is set to zero).
Eigen::VectorXcd solve_shifted(const Eigen::MatrixXd& T, const std::vector<Block>& blocks,
                               std::size_t m, std::complex<double> mu, Eigen::VectorXcd rhs,
                               double singular_tol);

/// Right eigenvector of T for eigenvalue `mu` of block `blocks[index]`,
/// supported on rows [0, block end). Not normalized.
Eigen::VectorXcd quasi_triangular_eigenvector(const Eigen::MatrixXd& T,
                                              const std::vector<Block>& blocks,
                                              std::size_t index, std::complex<double> mu,
                                              double singular_tol);

}  // namespace netspectra::detail
