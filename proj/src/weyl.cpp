#include "netspectra/weyl.hpp"

#include <algorithm>
#include <cmath>

#include "netspectra/error.hpp"
#include "netspectra/regression.hpp"

namespace netspectra {

RelaxationRates relaxation_rates(const SpectrumResult& spec) {
  RelaxationRates rates;
  rates.gammas.reserve(spec.pairs.size());
  for (const auto& p : spec.pairs) {
    const double modulus = std::abs(p.value);
    if (modulus == 0.0) {
      ++rates.excluded_zero;
      continue;
    }
    rates.gammas.push_back(-2.0 * std::log(modulus));
  }
  std::sort(rates.gammas.begin(), rates.gammas.end());
  return rates;
}

DensityCurve integrated_density(const SpectrumResult& spec, double lambda_min,
                                double merge_tol) {
  std::vector<double> gammas;
  for (const auto& p : spec.pairs) {
    const double modulus = std::abs(p.value);
    if (modulus >= lambda_min && modulus > 0.0) gammas.push_back(-2.0 * std::log(modulus));
  }
  if (gammas.empty()) throw DataError("no eigenvalues at or above the cutoff");
  std::sort(gammas.begin(), gammas.end());

  DensityCurve curve;
  curve.n_lambda = gammas.size();
  const auto total = static_cast<double>(gammas.size());
  std::size_t i = 0;
  while (i < gammas.size()) {
    const double step_at = gammas[i];
    std::size_t j = i + 1;
    while (j < gammas.size() && gammas[j] - gammas[j - 1] <= merge_tol) ++j;
    curve.gammas.push_back(std::max(0.0, step_at));
    curve.W.push_back(static_cast<double>(j) / total);
    i = j;
  }
  return curve;
}

std::size_t count_eigenvalues(const SpectrumResult& spec, double threshold) {
  if (threshold < spec.lambda_min - 1e-12) {
    throw ParameterError("threshold below the spectrum cutoff would undercount");
  }
  return static_cast<std::size_t>(std::count_if(
      spec.pairs.begin(), spec.pairs.end(),
      [&](const EigenPair& p) { return std::abs(p.value) > threshold; }));
}

std::vector<DegeneracyCount> degeneracy_census(const SpectrumResult& spec, double alpha,
                                               std::size_t m_max, double tol) {
  if (m_max < 1) throw ParameterError("m_max must be at least 1");
  std::vector<DegeneracyCount> census;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double target = alpha / static_cast<double>(m);
    const auto count = std::count_if(spec.pairs.begin(), spec.pairs.end(), [&](const EigenPair& p) {
      return std::abs(std::abs(p.value) - target) <= tol;
    });
    census.push_back({m, static_cast<std::size_t>(count)});
  }
  return census;
}

WeylFit weyl_fit(std::span<const WeylPoint> points, double threshold) {
  if (points.size() < 2) throw DataError("a Weyl fit needs at least two (N, N_lambda) points");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.n > 0.0) || !(p.n_lambda > 0.0)) {
      throw ParameterError("Weyl fit points must be positive");
    }
    x.push_back(std::log(p.n));
    y.push_back(std::log(p.n_lambda));
  }
  const LineFit line = fit_line(x, y);
  WeylFit fit;
  fit.nu = line.slope;
  fit.stderr_nu = line.slope_stderr;
  fit.intercept = line.intercept;
  fit.threshold = threshold;
  fit.points.assign(points.begin(), points.end());
  return fit;
}

double dimension_from_nu(double nu) {
  if (!(nu > 0.0)) throw ParameterError("nu must be positive");
  return 2.0 * nu;
}

}  // namespace netspectra
