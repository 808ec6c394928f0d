#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "netspectra/error.hpp"
#include "netspectra/spectral.hpp"
#include "support.hpp"

using namespace netspectra;
using cd = std::complex<double>;

namespace {

constexpr double alpha = 0.85;

// Disjoint union; node ids of `b` are shifted by a.size().
DirectedGraph disjoint_union(const DirectedGraph& a, const DirectedGraph& b) {
  auto edges = a.edges();
  for (Edge e : b.edges()) {
    edges.push_back({static_cast<NodeId>(e.src + a.size()), static_cast<NodeId>(e.dst + a.size())});
  }
  return DirectedGraph(a.size() + b.size(), std::move(edges));
}

DirectedGraph mixed_graph(std::size_t n, std::uint64_t seed) {
  switch (seed % 3) {
    case 0:
      return testing::random_graph(n, 1.2, seed);
    case 1:
      return generate_preferential(n, 1 + seed % 3, seed);
    default: {
      // Sparse random graph with a planted cycle pair, to exercise degeneracy.
      const auto base = testing::random_graph(n - 8, 1.0, seed);
      return disjoint_union(base, disjoint_union(generate_cycle(4), generate_cycle(4)));
    }
  }
}

SpectrumResult arnoldi(const DirectedGraph& g, std::size_t krylov, std::uint64_t seed = 0) {
  ArnoldiOptions opt;
  opt.krylov_dim = krylov;
  opt.seed = seed;
  return arnoldi_spectrum(build_operator(g, alpha), opt);
}

}  // namespace

TEST_CASE("3-cycle spectrum") {
  const auto spec = arnoldi(generate_cycle(3), 3);
  CHECK(spec.status == SpectrumStatus::complete);
  const std::vector<cd> expected{1.0, alpha * std::polar(1.0, 2 * std::numbers::pi / 3),
                                 alpha * std::polar(1.0, -2 * std::numbers::pi / 3)};
  const auto m = testing::greedy_match(testing::values_above(spec, 0.0), expected);
  CHECK(m.same_count);
  CHECK(m.worst < 1e-10);
}

TEST_CASE("dense spectrum examples") {
  const auto one = dense_spectrum(DirectedGraph(1, {}), alpha);
  REQUIRE(one.pairs.size() == 1);
  CHECK(std::abs(one.pairs[0].value - 1.0) < 1e-14);

  // trace 0.575, det -0.425: lambda^2 - 0.575 lambda - 0.425 = (lambda - 1)(lambda + 0.425).
  const auto two = dense_spectrum(generate_chain(2), alpha);
  REQUIRE(two.pairs.size() == 2);
  CHECK(std::abs(two.pairs[0].value - 1.0) < 1e-14);
  CHECK(std::abs(two.pairs[1].value + 0.425) < 1e-14);

  CHECK_THROWS_AS(dense_spectrum(generate_chain(2001), alpha), SizeError);
}

TEST_CASE("eigenstate localized on an isolated 6-cycle") {
  const auto g = disjoint_union(testing::random_graph(60, 1.5, 11), generate_cycle(6));
  const auto spec = arnoldi(g, 40);
  const cd target = alpha * std::polar(1.0, 2 * std::numbers::pi / 3);
  const EigenPair* hit = nullptr;
  for (const auto& p : spec.pairs) {
    if (std::abs(p.value - target) < 1e-10 && !p.vector.empty()) hit = &p;
  }
  REQUIRE(hit != nullptr);
  double outside = 0.0;
  for (std::size_t j = 0; j < 60; ++j) outside += std::norm(hit->vector[j]);
  CHECK(outside < 1e-16);
  for (std::size_t j = 60; j < 66; ++j) {
    CHECK(std::abs(std::abs(hit->vector[j]) - 1.0 / std::sqrt(6.0)) < 1e-9);
  }
}

TEST_CASE("arnoldi agrees with the dense oracle") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = std::array<std::size_t, 4>{20, 50, 100, 200}[seed % 4];
    const auto g = mixed_graph(n, seed);
    const auto spec = arnoldi(g, 600, seed);
    const auto dense = dense_spectrum(g, alpha);
    const auto m = testing::greedy_match(testing::values_above(spec, 0.1),
                                         testing::values_above(dense, 0.1));
    CHECK(m.same_count);
    CHECK(m.worst < 1e-8);
    CHECK(spec.status == SpectrumStatus::complete);
  }
}

TEST_CASE("a small basis still reaches the dense result") {
  const auto g = testing::random_graph(100, 1.3, 21);
  const auto dense = dense_spectrum(g, alpha);
  for (std::size_t krylov : {30u, 45u}) {
    const auto spec = arnoldi(g, krylov);
    const auto m = testing::greedy_match(testing::values_above(spec, 0.1),
                                         testing::values_above(dense, 0.1));
    CHECK(m.same_count);
    CHECK(m.worst < 1e-8);
  }
}

TEST_CASE("degenerate eigenvalues are counted with multiplicity") {
  DirectedGraph g = generate_cycle(5);
  for (int copy = 0; copy < 6; ++copy) g = disjoint_union(g, generate_cycle(5));
  g = disjoint_union(g, testing::random_graph(40, 1.5, 2));
  const auto spec = arnoldi(g, 50);
  const auto dense = dense_spectrum(g, alpha);
  const auto m = testing::greedy_match(testing::values_above(spec, 0.1),
                                       testing::values_above(dense, 0.1));
  CHECK(m.same_count);
  CHECK(m.worst < 1e-8);
  // Seven cycles give seven unit eigenvalues of S; all but one map to alpha.
  std::size_t at_alpha = 0, dense_at_alpha = 0;
  for (const auto& p : spec.pairs) at_alpha += std::abs(p.value - alpha) < 1e-8;
  for (const auto& p : dense.pairs) dense_at_alpha += std::abs(p.value - alpha) < 1e-8;
  CHECK(at_alpha >= 6);
  CHECK(at_alpha == dense_at_alpha);
}

TEST_CASE("spectral mapping between S and G") {
  // Sparse graphs have defective zero eigenvalues that rounding scatters to
  // ~eps^(1/k); only eigenvalues away from zero are resolvable to 1e-10.
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto g = testing::random_graph(30 + 10 * seed, 1.0, seed);
    Eigen::EigenSolver<Eigen::MatrixXd> s_solver(dense_s_matrix(g), false);
    std::vector<cd> mapped{1.0};
    bool removed = false;
    for (Eigen::Index i = 0; i < s_solver.eigenvalues().size(); ++i) {
      const cd v = s_solver.eigenvalues()(i);
      if (!removed && std::abs(v - 1.0) < 1e-9) {
        removed = true;
        continue;
      }
      mapped.push_back(alpha * v);
    }
    REQUIRE(removed);
    const auto dense = dense_spectrum(g, alpha);
    CHECK(dense.pairs.size() == mapped.size());
    std::erase_if(mapped, [](cd v) { return std::abs(v) <= 0.05; });
    const auto m = testing::greedy_match(testing::values_above(dense, 0.05), mapped);
    CHECK(m.same_count);
    CHECK(m.worst < 1e-10);
  }
}

TEST_CASE("spectrum invariants on random graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = mixed_graph(80, seed);
    const auto op = build_operator(g, alpha);
    const auto spec = arnoldi(g, 60, seed);
    CHECK(spec.status == SpectrumStatus::complete);
    for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
      const auto& p = spec.pairs[i];
      CHECK(std::abs(p.value) <= 1.0 + 1e-10);
      CHECK(std::abs(p.value) >= spec.lambda_min - 1e-9);
      CHECK(p.residual <= spec.tol);
      if (i > 0) CHECK(std::abs(spec.pairs[i - 1].value) >= std::abs(p.value));
      if (!p.vector.empty()) {
        double norm2 = 0.0;
        for (const auto& x : p.vector) norm2 += std::norm(x);
        CHECK(std::abs(norm2 - 1.0) < 1e-12);
        CHECK(residual(op, p.value, p.vector) <= spec.tol);
      }
      if (std::abs(p.value.imag()) > 1e-12) {
        bool conjugate = false;
        for (const auto& q : spec.pairs) conjugate |= std::abs(q.value - std::conj(p.value)) < 1e-9;
        CHECK(conjugate);
      }
      // Deflation soundness: no returned vector duplicates another.
      for (std::size_t j = 0; j < i; ++j) {
        const auto& q = spec.pairs[j];
        if (p.vector.empty() || q.vector.empty() || std::abs(p.value - q.value) > 1e-8) continue;
        cd dot = 0.0;
        for (std::size_t k = 0; k < p.vector.size(); ++k) dot += std::conj(q.vector[k]) * p.vector[k];
        CHECK(std::abs(dot) <= 0.999);
      }
    }
  }
}

TEST_CASE("seeds change the path but not the result") {
  const auto g = testing::random_graph(120, 1.4, 8);
  const auto a = arnoldi(g, 50, 1);
  const auto b = arnoldi(g, 50, 2);
  const auto m = testing::greedy_match(testing::values_above(a, 0.1), testing::values_above(b, 0.1));
  CHECK(m.same_count);
  CHECK(m.worst < 1e-8);
  const auto again = arnoldi(g, 50, 1);
  REQUIRE(again.pairs.size() == a.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) CHECK(a.pairs[i].value == again.pairs[i].value);
}

TEST_CASE("too small a basis is reported as partial") {
  // Many eigenvalues above the cutoff and a tiny refinement budget.
  DirectedGraph g = generate_cycle(9);
  for (int copy = 0; copy < 8; ++copy) g = disjoint_union(g, generate_cycle(9));
  ArnoldiOptions opt;
  opt.krylov_dim = 4;
  opt.max_refinements = 1;
  const auto spec = arnoldi_spectrum(build_operator(g, alpha), opt);
  CHECK(spec.status == SpectrumStatus::partial);
}

TEST_CASE("a tight restart budget is reported as a lower bound") {
  DirectedGraph g = generate_cycle(3);
  for (int copy = 0; copy < 10; ++copy) g = disjoint_union(g, generate_cycle(3));
  ArnoldiOptions opt;
  opt.krylov_dim = 6;
  opt.max_restarts = 1;
  const auto spec = arnoldi_spectrum(build_operator(g, alpha), opt);
  CHECK(spec.status == SpectrumStatus::lower_bound);
  for (const auto& p : spec.pairs) CHECK(p.residual <= spec.tol);
}

TEST_CASE("residual") {
  const auto op = build_operator(generate_cycle(3), alpha);
  const std::vector<cd> uniform(3, 1.0 / std::sqrt(3.0));
  CHECK(residual(op, 1.0, uniform) < 1e-15);
  const std::vector<cd> zero(3, 0.0);
  CHECK_THROWS_AS(residual(op, 1.0, zero), ParameterError);

  const auto g = testing::random_graph(30, 2.0, 4);
  const auto op2 = build_operator(g, alpha);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  std::vector<cd> psi(30);
  for (auto& x : psi) x = {dist(rng), dist(rng)};
  CHECK(residual(op2, 0.0, psi) > 0.0);

  const auto dense = dense_spectrum(g, alpha);
  for (const auto& p : dense.pairs) CHECK(residual(op2, p.value, p.vector) < 1e-12);
}

TEST_CASE("parameter validation") {
  const auto op = build_operator(generate_cycle(5), alpha);
  ArnoldiOptions opt;
  opt.lambda_min = 0.0;
  CHECK_THROWS_AS(arnoldi_spectrum(op, opt), ParameterError);
  opt.lambda_min = 1.0;
  CHECK_THROWS_AS(arnoldi_spectrum(op, opt), ParameterError);
  opt = {};
  opt.krylov_dim = 1;
  CHECK_THROWS_AS(arnoldi_spectrum(op, opt), ParameterError);
  opt = {};
  opt.tol = 0.0;
  CHECK_THROWS_AS(arnoldi_spectrum(op, opt), ParameterError);
}

TEST_CASE("single node") {
  const auto spec = arnoldi(DirectedGraph(1, {}), 600);
  REQUIRE(spec.pairs.size() == 1);
  CHECK(std::abs(spec.pairs[0].value - 1.0) < 1e-15);
}
