#include "netspectra/detail/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netspectra/error.hpp"

namespace netspectra::detail {

RealSchur hessenberg_schur(Eigen::MatrixXd H) {
  const int nn = static_cast<int>(H.rows());
  if (H.cols() != nn) throw ParameterError("Schur decomposition needs a square matrix");
  RealSchur result;
  result.Z = Eigen::MatrixXd::Identity(nn, nn);
  Eigen::MatrixXd& Z = result.Z;
  for (int j = 0; j < nn; ++j) {
    for (int i = j + 2; i < nn; ++i) H(i, j) = 0.0;
  }

  const double eps = std::numeric_limits<double>::epsilon();
  double norm = 0.0;
  for (int i = 0; i < nn; ++i) {
    for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(H(i, j));
  }

  std::vector<Block> reversed;
  int n = nn - 1;
  double exshift = 0.0;
  int iter = 0;
  int total_iter = 0;
  const int max_total_iter = 40 * std::max(nn, 1);
  double p = 0, q = 0, r = 0, s = 0, z = 0, w = 0, x = 0, y = 0;

  while (n >= 0) {
    // Find a negligible subdiagonal entry.
    int l = n;
    while (l > 0) {
      s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(H(l, l - 1)) < eps * s) break;
      --l;
    }
    if (l > 0) H(l, l - 1) = 0.0;

    if (l == n) {
      // One real root.
      H(n, n) += exshift;
      reversed.push_back({static_cast<std::size_t>(n), 1});
      --n;
      iter = 0;
    } else if (l == n - 1) {
      // Two roots.
      w = H(n, n - 1) * H(n - 1, n);
      p = (H(n - 1, n - 1) - H(n, n)) / 2.0;
      q = p * p + w;
      z = std::sqrt(std::abs(q));
      H(n, n) += exshift;
      H(n - 1, n - 1) += exshift;
      if (q >= 0) {
        // Real pair: rotate to upper triangular.
        z = (p >= 0) ? p + z : p - z;
        x = H(n, n - 1);
        s = std::abs(x) + std::abs(z);
        p = x / s;
        q = z / s;
        r = std::sqrt(p * p + q * q);
        p /= r;
        q /= r;
        for (int j = n - 1; j < nn; ++j) {
          z = H(n - 1, j);
          H(n - 1, j) = q * z + p * H(n, j);
          H(n, j) = q * H(n, j) - p * z;
        }
        for (int i = 0; i <= n; ++i) {
          z = H(i, n - 1);
          H(i, n - 1) = q * z + p * H(i, n);
          H(i, n) = q * H(i, n) - p * z;
        }
        for (int i = 0; i < nn; ++i) {
          z = Z(i, n - 1);
          Z(i, n - 1) = q * z + p * Z(i, n);
          Z(i, n) = q * Z(i, n) - p * z;
        }
        H(n, n - 1) = 0.0;
        reversed.push_back({static_cast<std::size_t>(n), 1});
        reversed.push_back({static_cast<std::size_t>(n - 1), 1});
      } else {
        reversed.push_back({static_cast<std::size_t>(n - 1), 2});
      }
      n -= 2;
      iter = 0;
    } else {
      if (++total_iter > max_total_iter) {
        throw NumericalError("Hessenberg QR iteration did not converge");
      }
      x = H(n, n);
      y = 0.0;
      w = 0.0;
      if (l < n) {
        y = H(n - 1, n - 1);
        w = H(n, n - 1) * H(n - 1, n);
      }
      if (iter == 10) {
        exshift += x;
        for (int i = 0; i <= n; ++i) H(i, i) -= x;
        s = std::abs(H(n, n - 1)) + std::abs(H(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      if (iter == 30) {
        s = (y - x) / 2.0;
        s = s * s + w;
        if (s > 0) {
          s = std::sqrt(s);
          if (y < x) s = -s;
          s = x - w / ((y - x) / 2.0 + s);
          for (int i = 0; i <= n; ++i) H(i, i) -= s;
          exshift += s;
          x = y = w = 0.964;
        }
      }
      ++iter;

      // Look for two consecutive small subdiagonal entries.
      int m = n - 2;
      while (m >= l) {
        z = H(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / H(m + 1, m) + H(m, m + 1);
        q = H(m + 1, m + 1) - z - r - s;
        r = H(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            eps * (std::abs(p) *
                   (std::abs(H(m - 1, m - 1)) + std::abs(z) + std::abs(H(m + 1, m + 1))))) {
          break;
        }
        --m;
      }
      for (int i = m + 2; i <= n; ++i) {
        H(i, i - 2) = 0.0;
        if (i > m + 2) H(i, i - 3) = 0.0;
      }

      // Double QR step on rows l..n, columns m..n.
      for (int k = m; k <= n - 1; ++k) {
        const bool notlast = (k != n - 1);
        if (k != m) {
          p = H(k, k - 1);
          q = H(k + 1, k - 1);
          r = notlast ? H(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0) s = -s;
        if (s != 0) {
          if (k != m) {
            H(k, k - 1) = -s * x;
          } else if (l != m) {
            H(k, k - 1) = -H(k, k - 1);
          }
          p += s;
          x = p / s;
          y = q / s;
          z = r / s;
          q /= p;
          r /= p;
          for (int j = k; j < nn; ++j) {
            p = H(k, j) + q * H(k + 1, j);
            if (notlast) {
              p += r * H(k + 2, j);
              H(k + 2, j) -= p * z;
            }
            H(k, j) -= p * x;
            H(k + 1, j) -= p * y;
          }
          for (int i = 0; i <= std::min(n, k + 3); ++i) {
            p = x * H(i, k) + y * H(i, k + 1);
            if (notlast) {
              p += z * H(i, k + 2);
              H(i, k + 2) -= p * r;
            }
            H(i, k) -= p;
            H(i, k + 1) -= p * q;
          }
          for (int i = 0; i < nn; ++i) {
            p = x * Z(i, k) + y * Z(i, k + 1);
            if (notlast) {
              p += z * Z(i, k + 2);
              Z(i, k + 2) -= p * r;
            }
            Z(i, k) -= p;
            Z(i, k + 1) -= p * q;
          }
        }
      }
    }
  }

  for (int j = 0; j < nn; ++j) {
    for (int i = j + 2; i < nn; ++i) H(i, j) = 0.0;
  }
  result.blocks.assign(reversed.rbegin(), reversed.rend());
  for (const Block& b : result.blocks) {
    if (b.start > 0) H(b.start, b.start - 1) = 0.0;
  }
  result.T = std::move(H);
  return result;
}

RealSchur general_schur(Eigen::MatrixXd A) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd v;
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    v = A.col(k).tail(len);
    const double norm = v.norm();
    if (norm == 0.0) continue;
    const double alpha = v(0) > 0.0 ? -norm : norm;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // A <- (I - 2vv^T) A (I - 2vv^T) on the trailing rows/columns.
    auto rows = A.bottomRows(len);
    rows -= 2.0 * v * (v.transpose() * rows);
    auto cols = A.rightCols(len);
    cols -= 2.0 * (cols * v) * v.transpose();
    auto pcols = P.rightCols(len);
    pcols -= 2.0 * (pcols * v) * v.transpose();
    A.col(k).tail(len - 1).setZero();
    A(k + 1, k) = alpha;
  }
  RealSchur s = hessenberg_schur(std::move(A));
  s.Z = P * s.Z;
  return s;
}

bool swap_adjacent_blocks(RealSchur& s, std::size_t b) {
  const Block first = s.blocks[b];
  const Block second = s.blocks[b + 1];
  const auto j = static_cast<Eigen::Index>(first.start);
  const auto p = static_cast<Eigen::Index>(first.size);
  const auto q = static_cast<Eigen::Index>(second.size);
  const Eigen::Index w = p + q;

  // [A C; 0 B] [X; I] = [X; I] B  <=>  A X - X B = -C.
  const Eigen::MatrixXd A = s.T.block(j, j, p, p);
  const Eigen::MatrixXd B = s.T.block(j + p, j + p, q, q);
  const Eigen::MatrixXd C = s.T.block(j, j + p, p, q);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p * q, p * q);
  for (Eigen::Index c = 0; c < q; ++c) {
    K.block(c * p, c * p, p, p) += A;
    for (Eigen::Index r = 0; r < q; ++r) {
      K.block(r * p, c * p, p, p) -= B(c, r) * Eigen::MatrixXd::Identity(p, p);
    }
  }
  Eigen::VectorXd rhs(p * q);
  for (Eigen::Index c = 0; c < q; ++c) rhs.segment(c * p, p) = -C.col(c);
  const Eigen::VectorXd x = K.fullPivLu().solve(rhs);
  if (!x.allFinite()) return false;

  Eigen::MatrixXd Y(w, q);
  for (Eigen::Index c = 0; c < q; ++c) Y.col(c).head(p) = x.segment(c * p, p);
  Y.bottomRows(q) = Eigen::MatrixXd::Identity(q, q);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(w, w);

  const Eigen::MatrixXd local = Q.transpose() * s.T.block(j, j, w, w) * Q;
  const double scale = std::max(1.0, s.T.block(j, j, w, w).norm());
  if (!(local.block(q, 0, p, q).norm() <= 1e-12 * scale)) return false;

  const Eigen::Index n = s.T.rows();
  s.T.middleRows(j, w) = Q.transpose() * s.T.middleRows(j, w);
  s.T.middleCols(j, w) = s.T.middleCols(j, w) * Q;
  s.T.block(j + q, j, p, q).setZero();
  if (j + w < n) s.T.block(j + w, j, n - j - w, w).setZero();
  s.Z.middleCols(j, w) = s.Z.middleCols(j, w) * Q;
  s.blocks[b] = {first.start, second.size};
  s.blocks[b + 1] = {first.start + second.size, first.size};
  return true;
}

std::size_t move_to_front(RealSchur& s, const std::vector<std::size_t>& selection) {
  std::vector<std::size_t> ids(s.blocks.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  for (std::size_t target = 0; target < selection.size(); ++target) {
    std::size_t pos = static_cast<std::size_t>(
        std::find(ids.begin(), ids.end(), selection[target]) - ids.begin());
    while (pos > target) {
      if (!swap_adjacent_blocks(s, pos - 1)) return target;
      std::swap(ids[pos - 1], ids[pos]);
      --pos;
    }
  }
  return selection.size();
}

std::array<std::complex<double>, 2> block_eigenvalues(const Eigen::MatrixXd& T, const Block& b) {
  const std::size_t i = b.start;
  if (b.size == 1) return {T(i, i), T(i, i)};
  const double a = T(i, i), bb = T(i, i + 1), c = T(i + 1, i), d = T(i + 1, i + 1);
  const double half_trace = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double disc = half_diff * half_diff + bb * c;
  if (disc >= 0) {
    // Only reached for blocks not produced by hessenberg_schur.
    const double root = std::sqrt(disc);
    return {half_trace + root, half_trace - root};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(half_trace, im), std::complex<double>(half_trace, -im)};
}

Eigen::VectorXcd solve_shifted(const Eigen::MatrixXd& T, const std::vector<Block>& blocks,
                               std::size_t m, std::complex<double> mu, Eigen::VectorXcd rhs,
                               double singular_tol) {
  using cd = std::complex<double>;
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, T.lpNorm<1>());
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    const Block& b = *it;
    if (b.start + b.size > m) continue;
    const auto s = static_cast<Eigen::Index>(b.start);
    const auto e = static_cast<Eigen::Index>(b.start + b.size);
    const auto mm = static_cast<Eigen::Index>(m);
    Eigen::VectorXcd num = rhs.segment(s, b.size);
    if (e < mm) {
      num -= T.block(s, e, b.size, mm - e).cast<cd>() * z.segment(e, mm - e);
    }
    if (b.size == 1) {
      cd piv = T(s, s) - mu;
      if (std::abs(piv) <= singular_tol) {
        z(s) = 0.0;
      } else {
        if (piv == cd(0.0)) piv = tiny;
        z(s) = num(0) / piv;
      }
    } else {
      const cd m00 = T(s, s) - mu, m01 = T(s, s + 1), m10 = T(s + 1, s),
               m11 = T(s + 1, s + 1) - mu;
      const cd det = m00 * m11 - m01 * m10;
      const double fro2 = std::norm(m00) + std::norm(m01) + std::norm(m10) + std::norm(m11);
      const double fro = std::sqrt(fro2);
      if (fro == 0.0) {
        z.segment(s, 2).setZero();
      } else if (std::abs(det) <= singular_tol * fro) {
        // Rank one: minimum-norm solution via M^+ = M^H / |M|_F^2.
        z(s) = (std::conj(m00) * num(0) + std::conj(m10) * num(1)) / fro2;
        z(s + 1) = (std::conj(m01) * num(0) + std::conj(m11) * num(1)) / fro2;
      } else {
        z(s) = (m11 * num(0) - m01 * num(1)) / det;
        z(s + 1) = (m00 * num(1) - m10 * num(0)) / det;
      }
    }
  }
  return z;
}

Eigen::VectorXcd quasi_triangular_eigenvector(const Eigen::MatrixXd& T,
                                              const std::vector<Block>& blocks,
                                              std::size_t index, std::complex<double> mu,
                                              double singular_tol) {
  using cd = std::complex<double>;
  const Block& b = blocks.at(index);
  const auto s = static_cast<Eigen::Index>(b.start);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.start + b.size));
  if (b.size == 1) {
    v(s) = 1.0;
  } else {
    const cd a = T(s, s) - mu, bb = T(s, s + 1), c = T(s + 1, s), d = T(s + 1, s + 1) - mu;
    // Either row of the singular block gives a null vector; take the better scaled one.
    const cd x1 = bb, y1 = -a;
    const cd x2 = -d, y2 = c;
    if (std::norm(x1) + std::norm(y1) >= std::norm(x2) + std::norm(y2)) {
      v(s) = x1;
      v(s + 1) = y1;
    } else {
      v(s) = x2;
      v(s + 1) = y2;
    }
  }
  if (s > 0) {
    Eigen::VectorXcd rhs = -(T.block(0, s, s, b.size).cast<cd>() * v.segment(s, b.size));
    v.head(s) = solve_shifted(T, blocks, b.start, mu, std::move(rhs), singular_tol);
  }
  return v;
}

}  // namespace netspectra::detail
