#include "netspectra/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "netspectra/detail/schur.hpp"
#include "netspectra/error.hpp"

namespace netspectra {

const char* to_string(SpectrumStatus status) {
  switch (status) {
    case SpectrumStatus::complete:
      return "complete";
    case SpectrumStatus::partial:
      return "partial";
    case SpectrumStatus::lower_bound:
      return "lower_bound";
  }
  return "unknown";
}

bool SpectrumResult::has_vectors() const {
  return !pairs.empty() && std::any_of(pairs.begin(), pairs.end(),
                                       [](const EigenPair& p) { return !p.vector.empty(); });
}

namespace {

using cd = std::complex<double>;
using detail::Block;

void apply_op(const GoogleOperator& op, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
  out.resize(v.size());
  op.apply(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())),
           std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
}

double vector_residual(const GoogleOperator& op, cd lambda, const Eigen::VectorXcd& x) {
  return residual(op, lambda,
                  std::span<const cd>(x.data(), static_cast<std::size_t>(x.size())));
}

// Locked invariant subspace: G Q = Q T + E with Q orthonormal (real) and T
// quasi-upper-triangular with the block structure in `blocks`.
class LockedSubspace {
 public:
  LockedSubspace(const GoogleOperator& op, std::size_t n) : op_(op), basis_(n, 16) {}

  std::size_t size() const noexcept { return k_; }
  auto basis() const { return basis_.leftCols(static_cast<Eigen::Index>(k_)); }
  const Eigen::MatrixXd& schur() const noexcept { return schur_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  double block_residual(std::size_t b) const { return residuals_[b]; }

  // Two passes of classical Gram-Schmidt against the locked basis.
  void project_out(Eigen::VectorXd& w) const {
    if (k_ == 0) return;
    for (int pass = 0; pass < 2; ++pass) w -= basis() * (basis().transpose() * w);
  }

  /// Appends the span of `vectors` (one real vector, or the real and
  /// imaginary parts of a complex Ritz vector). Rolls back and returns false
  /// if the extended basis is not invariant within `tol`.
  bool lock(std::vector<Eigen::VectorXd> vectors, double tol) {
    const std::size_t start = k_;
    for (auto& u : vectors) {
      const double before = u.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (k_ > 0) u -= basis() * (basis().transpose() * u);
      }
      const double after = u.norm();
      if (!(after > 1e-8 * before)) {
        k_ = start;
        return false;
      }
      append(u / after);
    }
    const std::size_t k = k_;
    const std::size_t width = k - start;
    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                  static_cast<Eigen::Index>(k));
    grown.topLeftCorner(schur_.rows(), schur_.cols()) = schur_;
    double worst = 0.0;
    Eigen::VectorXd g;
    for (std::size_t c = start; c < k; ++c) {
      apply_op(op_, basis_.col(static_cast<Eigen::Index>(c)), g);
      Eigen::VectorXd coeffs = basis().transpose() * g;
      Eigen::VectorXd rest = g - basis() * coeffs;
      const Eigen::VectorXd correction = basis().transpose() * rest;
      coeffs += correction;
      rest -= basis() * correction;
      grown.col(static_cast<Eigen::Index>(c)) = coeffs;
      worst = std::max(worst, rest.norm());
    }
    const Block block{start, width};
    if (width == 2) {
      const auto eig = detail::block_eigenvalues(grown, block);
      if (eig[0].imag() <= 0.0) {
        k_ = start;
        return false;
      }
    }
    if (!(worst <= tol)) {
      k_ = start;
      return false;
    }
    schur_ = std::move(grown);
    blocks_.push_back(block);
    residuals_.push_back(worst);
    return true;
  }

 private:
  void append(const Eigen::VectorXd& q) {
    if (static_cast<Eigen::Index>(k_) == basis_.cols()) {
      basis_.conservativeResize(Eigen::NoChange, 2 * basis_.cols());
    }
    basis_.col(static_cast<Eigen::Index>(k_)) = q;
    ++k_;
  }

  const GoogleOperator& op_;
  Eigen::MatrixXd basis_;
  std::size_t k_ = 0;
  Eigen::MatrixXd schur_;
  std::vector<Block> blocks_;
  std::vector<double> residuals_;
};

struct RitzCandidate {
  std::size_t block;
  cd value;
  double estimate;  // eigenvector residual bound
};

struct CycleOutcome {
  std::size_t locked = 0;      // eigenvalues added (complex pairs count 2)
  std::size_t unconverged = 0;  // wanted Ritz values left when the budget ran out
  bool exhausted = false;       // no complement left to search
};

// Orthonormal basis of span(X) in the complement of the locked subspace;
// numerically dependent columns are dropped.
Eigen::MatrixXd complement_basis(const LockedSubspace& locked, Eigen::MatrixXd X) {
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    Eigen::VectorXd u = X.col(c);
    const double before = u.norm();
    locked.project_out(u);
    for (int pass = 0; pass < 2 && kept > 0; ++pass) {
      u -= X.leftCols(kept) * (X.leftCols(kept).transpose() * u);
    }
    const double after = u.norm();
    if (!(after > 1e-8 * before)) continue;
    X.col(kept++) = u / after;
  }
  return X.leftCols(kept);
}

// Orthogonalizes w against the locked subspace and `basis` (two classical
// Gram-Schmidt passes); returns the coefficients on `basis`.
template <typename Basis>
Eigen::VectorXd orthogonalize(const LockedSubspace& locked, const Basis& basis,
                              Eigen::VectorXd& w) {
  locked.project_out(w);
  Eigen::VectorXd h = basis.transpose() * w;
  w -= basis * h;
  const Eigen::VectorXd h2 = basis.transpose() * w;
  w -= basis * h2;
  h += h2;
  locked.project_out(w);
  return h;
}

// One search from a fresh random start vector. Each build extends the kept
// Ritz vectors of the previous build (none at first) by Arnoldi steps to
// `krylov_dim` vectors, projects G onto the result, locks converged Ritz
// pairs and keeps the leading unconverged ones. The cycle ends when no Ritz
// value above the cutoff is left unconverged.
CycleOutcome arnoldi_cycle(const GoogleOperator& op, LockedSubspace& locked,
                           std::size_t krylov_dim, const ArnoldiOptions& opt,
                           std::mt19937_64& rng) {
  CycleOutcome outcome;
  const auto n = static_cast<Eigen::Index>(op.size());
  const double lock_floor = opt.lambda_min * (1.0 - 1e-6);
  // Eigenvalue error is the residual times the eigenvalue condition number,
  // which is well above 1 for non-normal G; converge well below tol.
  const double converge_tol = std::max(opt.tol * 1e-3, 1e-13);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd kept(n, 0);
  Eigen::VectorXd w(n);

  for (std::size_t build = 0; build < opt.max_refinements; ++build) {
    const std::size_t free_dim = op.size() - locked.size();
    if (free_dim == 0) {
      outcome.exhausted = true;
      outcome.unconverged = 0;
      return outcome;
    }
    const auto m = static_cast<Eigen::Index>(std::min(krylov_dim, free_dim));
    const Eigen::Index k = std::min(kept.cols(), m - 1);

    Eigen::MatrixXd V(n, m);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    V.leftCols(k) = kept.leftCols(k);

    // Continue from the largest residual direction of the kept vectors, or
    // from a random vector when they span an invariant subspace.
    Eigen::VectorXd start;
    double start_norm = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      apply_op(op, V.col(j), w);
      orthogonalize(locked, V.leftCols(k), w);
      const double r = w.norm();
      if (r > start_norm) {
        start_norm = r;
        start = w;
      }
    }
    if (!(start_norm > 1e-12)) {
      for (Eigen::Index i = 0; i < n; ++i) w(i) = normal(rng);
      orthogonalize(locked, V.leftCols(k), w);
      start_norm = w.norm();
      start = w;
      if (!(start_norm > 1e-10 * std::sqrt(static_cast<double>(n)))) {
        outcome.exhausted = k == 0;
        break;
      }
    }
    V.col(k) = start / start_norm;

    Eigen::Index used = m;
    double beta_last = 0.0;
    for (Eigen::Index j = k; j < m; ++j) {
      apply_op(op, V.col(j), w);
      const Eigen::VectorXd h = orthogonalize(locked, V.leftCols(j + 1), w);
      H.block(0, j, j + 1, 1) = h;
      const double beta = w.norm();
      if (!std::isfinite(beta)) throw NumericalError("non-finite value in Arnoldi iteration");
      if (j + 1 == m) {
        beta_last = beta;
        break;
      }
      if (beta <= 1e-12 * std::max(1.0, h.norm())) {
        used = j + 1;
        break;
      }
      H(j + 1, j) = beta;
      V.col(j + 1) = w / beta;
    }

    // Kept columns: full projection onto the final basis plus the norm of
    // what lies outside it.
    std::vector<double> kept_residual(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
      apply_op(op, V.col(j), w);
      H.block(0, j, used, 1) = orthogonalize(locked, V.leftCols(used), w);
      kept_residual[static_cast<std::size_t>(j)] = w.norm();
    }

    detail::RealSchur schur = k == 0 ? detail::hessenberg_schur(H.topLeftCorner(used, used))
                                     : detail::general_schur(H.topLeftCorner(used, used));

    // Residual bound for a unit vector with coordinates y in the basis.
    auto estimate = [&](const auto& y) {
      double e = std::abs(beta_last) * std::abs(y(used - 1));
      for (Eigen::Index j = 0; j < k; ++j) {
        e += kept_residual[static_cast<std::size_t>(j)] * std::abs(y(j));
      }
      return e;
    };

    // Order: wanted Ritz values whose eigenvector has converged, then the
    // other wanted ones, then the rest; descending |mu| within each group.
    std::vector<RitzCandidate> ritz;
    for (std::size_t b = 0; b < schur.blocks.size(); ++b) {
      const cd mu = detail::block_eigenvalues(schur.T, schur.blocks[b])[0];
      Eigen::VectorXcd y = Eigen::VectorXcd::Zero(used);
      const Eigen::VectorXcd local =
          detail::quasi_triangular_eigenvector(schur.T, schur.blocks, b, mu, 0.0);
      y.head(local.size()) = local;
      y = schur.Z.cast<cd>() * y;
      const double norm = y.norm();
      const double est = norm > 0.0 && std::isfinite(norm)
                             ? estimate(y / norm)
                             : std::numeric_limits<double>::infinity();
      ritz.push_back({b, mu, est});
    }
    auto group = [&](const RitzCandidate& c) {
      if (std::abs(c.value) < lock_floor) return 2;
      return c.estimate <= converge_tol ? 0 : 1;
    };
    std::stable_sort(ritz.begin(), ritz.end(), [&](const auto& a, const auto& b) {
      const int ga = group(a);
      const int gb = group(b);
      if (ga != gb) return ga < gb;
      return std::abs(a.value) > std::abs(b.value);
    });

    // Unconverged wanted values plus a margin are kept for the next build,
    // using at most half the basis.
    std::size_t wanted = 0;
    for (const auto& c : ritz) {
      if (group(c) < 2) wanted += schur.blocks[c.block].size;
    }
    const auto cap = static_cast<std::size_t>(std::max<Eigen::Index>(1, m / 2));
    const std::size_t margin = std::max<std::size_t>(2, static_cast<std::size_t>(m) / 8);
    std::vector<std::size_t> selection;
    std::size_t selected_width = 0;
    for (const auto& c : ritz) {
      if (group(c) == 2 && selected_width >= wanted + margin) break;
      selection.push_back(c.block);
      selected_width += schur.blocks[c.block].size;
    }
    // A failed swap leaves the remaining order arbitrary; locking below
    // checks every block anyway.
    detail::move_to_front(schur, selection);

    // Lock the longest prefix of Schur vectors that is converged and wanted.
    std::size_t column = 0;
    std::size_t block_pos = 0;
    for (; block_pos < schur.blocks.size(); ++block_pos) {
      const auto& blk = schur.blocks[block_pos];
      const cd mu = detail::block_eigenvalues(schur.T, blk)[0];
      if (std::abs(mu) < lock_floor) break;
      bool converged = true;
      for (std::size_t c = blk.start; c < blk.start + blk.size; ++c) {
        converged = converged && estimate(schur.Z.col(static_cast<Eigen::Index>(c))) <= converge_tol;
      }
      if (!converged) break;
      std::vector<Eigen::VectorXd> span;
      for (std::size_t c = blk.start; c < blk.start + blk.size; ++c) {
        span.push_back(V.leftCols(used) * schur.Z.col(static_cast<Eigen::Index>(c)));
      }
      if (!locked.lock(std::move(span), opt.tol)) break;
      outcome.locked += blk.size;
      column = blk.start + blk.size;
    }

    std::size_t wanted_left = 0;
    for (std::size_t b = block_pos; b < schur.blocks.size(); ++b) {
      const cd mu = detail::block_eigenvalues(schur.T, schur.blocks[b])[0];
      if (std::abs(mu) >= opt.lambda_min) wanted_left += schur.blocks[b].size;
    }
    outcome.unconverged = wanted_left;
    if (wanted_left == 0) return outcome;

    const std::size_t target = std::min(cap, wanted_left + margin);
    std::size_t width = 0;
    for (std::size_t b = block_pos; b < schur.blocks.size(); ++b) {
      const std::size_t bw = schur.blocks[b].size;
      if (width > 0 && width + bw > target) break;
      width += bw;
    }
    Eigen::MatrixXd X = V.leftCols(used) * schur.Z.middleCols(static_cast<Eigen::Index>(column),
                                                               static_cast<Eigen::Index>(width));
    kept = complement_basis(locked, std::move(X));
  }
  return outcome;
}

// Eigenvectors x = Q z for every locked block, recovered in column batches.
void recover_pairs(const GoogleOperator& op, const LockedSubspace& locked,
                   const ArnoldiOptions& opt, SpectrumResult& result) {
  const Eigen::MatrixXd& T = locked.schur();
  const auto& blocks = locked.blocks();
  const auto k = static_cast<Eigen::Index>(locked.size());

  struct Pending {
    std::size_t block;
    cd value;
  };
  std::vector<Pending> wanted;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const cd mu = detail::block_eigenvalues(T, blocks[b])[0];
    if (std::abs(mu) >= opt.lambda_min - 1e-9) wanted.push_back({b, mu});
  }

  auto emit = [&](const Pending& p, ComplexVector vec, double res) {
    const bool complex_pair = blocks[p.block].size == 2;
    const bool have = !vec.empty();
    if (!have && opt.keep_vectors) result.missing_vectors += complex_pair ? 2 : 1;
    if (complex_pair) {
      ComplexVector conj_vec(vec.size());
      std::transform(vec.begin(), vec.end(), conj_vec.begin(),
                     [](cd x) { return std::conj(x); });
      result.pairs.push_back({p.value, std::move(vec), res});
      result.pairs.push_back({std::conj(p.value), std::move(conj_vec), res});
    } else {
      result.pairs.push_back({cd(p.value.real(), 0.0), std::move(vec), res});
    }
  };

  if (!opt.keep_vectors) {
    for (const auto& p : wanted) emit(p, {}, locked.block_residual(p.block));
    return;
  }

  constexpr std::size_t batch = 64;
  const double loose = 1e-6;
  for (std::size_t first = 0; first < wanted.size(); first += batch) {
    const std::size_t count = std::min(batch, wanted.size() - first);
    Eigen::MatrixXcd Zc = Eigen::MatrixXcd::Zero(k, static_cast<Eigen::Index>(count));
    Eigen::MatrixXcd Zl = Zc;
    for (std::size_t c = 0; c < count; ++c) {
      const auto& p = wanted[first + c];
      const auto exact = detail::quasi_triangular_eigenvector(T, blocks, p.block, p.value, 0.0);
      const auto thresh = detail::quasi_triangular_eigenvector(T, blocks, p.block, p.value, loose);
      Zc.col(static_cast<Eigen::Index>(c)).head(exact.size()) = exact;
      Zl.col(static_cast<Eigen::Index>(c)).head(thresh.size()) = thresh;
    }
    const auto Q = locked.basis();
    const Eigen::MatrixXcd Xc = Q * Zc.real() + cd(0.0, 1.0) * (Q * Zc.imag());
    const Eigen::MatrixXcd Xl = Q * Zl.real() + cd(0.0, 1.0) * (Q * Zl.imag());
    for (std::size_t c = 0; c < count; ++c) {
      const auto& p = wanted[first + c];
      // The thresholded solve comes first: for a repeated eigenvalue it gives
      // a vector independent of the earlier copies, while the exact solve
      // drifts onto them.
      bool accepted = false;
      for (const Eigen::MatrixXcd* X : {&Xl, &Xc}) {
        Eigen::VectorXcd x = X->col(static_cast<Eigen::Index>(c));
        const double norm = x.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) continue;
        x /= norm;
        const double r = vector_residual(op, p.value, x);
        if (!(r <= opt.tol)) continue;
        const bool repeats =
            std::any_of(result.pairs.begin(), result.pairs.end(), [&](const EigenPair& e) {
              if (e.vector.empty() || std::abs(e.value - p.value) > opt.merge_tol) return false;
              const Eigen::Map<const Eigen::VectorXcd> ev(e.vector.data(), x.size());
              return std::abs(ev.dot(x)) > opt.merge_overlap;
            });
        if (repeats) continue;
        emit(p, ComplexVector(x.data(), x.data() + x.size()), r);
        accepted = true;
        break;
      }
      // A locked block is a distinct eigenvalue copy even when no independent
      // eigenvector exists (defective or nearly so); report it without one.
      if (!accepted) emit(p, {}, locked.block_residual(p.block));
    }
  }
}

}  // namespace

SpectrumResult arnoldi_spectrum(const GoogleOperator& op, const ArnoldiOptions& opt) {
  if (!(opt.lambda_min > 0.0 && opt.lambda_min < 1.0)) {
    throw ParameterError("lambda_min must lie in (0, 1)");
  }
  if (!(opt.tol > 0.0)) throw ParameterError("tolerance must be positive");
  const std::size_t n = op.size();
  if (opt.krylov_dim < 2 && n > 1) throw ParameterError("krylov_dim must be at least 2");

  SpectrumResult result;
  result.lambda_min = opt.lambda_min;
  result.n = n;
  result.alpha = op.alpha();
  result.method = "arnoldi";
  result.tol = opt.tol;

  if (n == 1) {
    // G = [alpha + (1 - alpha)] = [1].
    const ComplexVector one{cd(1.0, 0.0)};
    result.pairs.push_back({cd(1.0, 0.0), opt.keep_vectors ? one : ComplexVector{},
                            residual(op, 1.0, one)});
    return result;
  }

  const std::size_t krylov_dim = std::min(opt.krylov_dim, n);
  LockedSubspace locked(op, n);
  std::mt19937_64 rng(opt.seed);
  bool stopped = false;
  for (std::size_t cycle = 0; cycle < opt.max_restarts; ++cycle) {
    const CycleOutcome outcome = arnoldi_cycle(op, locked, krylov_dim, opt, rng);
    result.restarts = cycle + 1;
    if (outcome.unconverged > 0) {
      result.status = SpectrumStatus::partial;
      stopped = true;
      break;
    }
    if (outcome.locked == 0 || outcome.exhausted) {
      stopped = true;
      break;
    }
  }
  if (!stopped) result.status = SpectrumStatus::lower_bound;

  recover_pairs(op, locked, opt, result);
  sort_and_merge(result, opt.merge_tol, opt.merge_overlap);
  return result;
}

Eigen::MatrixXd dense_s_matrix(const DirectedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (NodeId j = 0; j < g.size(); ++j) {
    const auto out = g.out(j);
    if (out.empty()) {
      S.col(j).setConstant(1.0 / static_cast<double>(n));
    } else {
      for (NodeId i : out) S(i, j) = 1.0 / static_cast<double>(out.size());
    }
  }
  return S;
}

Eigen::MatrixXd dense_google_matrix(const DirectedGraph& g, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie strictly inside (0, 1)");
  const auto n = static_cast<double>(g.size());
  return (alpha * dense_s_matrix(g)).array() + (1.0 - alpha) / n;
}

SpectrumResult dense_spectrum(const DirectedGraph& g, double alpha) {
  constexpr std::size_t guard = 2000;
  if (g.size() > guard) {
    throw SizeError("dense spectrum limited to n <= " + std::to_string(guard) + ", got " +
                    std::to_string(g.size()));
  }
  if (g.empty()) throw ParameterError("graph has no nodes");
  const Eigen::MatrixXd G = dense_google_matrix(g, alpha);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(G, true);
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");

  SpectrumResult result;
  result.n = g.size();
  result.alpha = alpha;
  result.method = "dense";
  result.lambda_min = 0.0;
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  const Eigen::MatrixXcd Gc = G.cast<cd>();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    Eigen::VectorXcd v = vectors.col(i);
    v /= v.norm();
    const cd lambda = solver.eigenvalues()(i);
    const double r = (Gc * v - lambda * v).norm();
    worst = std::max(worst, r);
    result.pairs.push_back({lambda, ComplexVector(v.data(), v.data() + v.size()), r});
  }
  result.tol = worst;
  sort_and_merge(result, 0.0, 2.0);
  return result;
}

double residual(const GoogleOperator& op, std::complex<double> lambda,
                std::span<const std::complex<double>> psi) {
  double norm2 = 0.0;
  for (const auto& x : psi) norm2 += std::norm(x);
  if (!(norm2 > 0.0)) throw ParameterError("residual of a zero vector");
  const auto g = op.apply(psi);
  double r2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) r2 += std::norm(g[i] - lambda * psi[i]);
  return std::sqrt(r2 / norm2);
}

void sort_and_merge(SpectrumResult& spec, double value_tol, double overlap) {
  auto& pairs = spec.pairs;
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    const double ma = std::abs(a.value), mb = std::abs(b.value);
    if (ma != mb) return ma > mb;
    return std::arg(a.value) < std::arg(b.value);
  });
  if (!(overlap <= 1.0)) return;
  std::vector<EigenPair> kept;
  kept.reserve(pairs.size());
  for (auto& p : pairs) {
    bool duplicate = false;
    if (!p.vector.empty()) {
      for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
        if (std::abs(it->value) > std::abs(p.value) + value_tol) break;
        if (it->vector.empty() || std::abs(it->value - p.value) > value_tol) continue;
        cd dot = 0.0;
        for (std::size_t i = 0; i < p.vector.size(); ++i) {
          dot += std::conj(it->vector[i]) * p.vector[i];
        }
        if (std::abs(dot) > overlap) {
          duplicate = true;
          break;
        }
      }
    }
    if (!duplicate) kept.push_back(std::move(p));
  }
  pairs = std::move(kept);
}

}  // namespace netspectra
