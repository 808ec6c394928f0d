#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "netspectra/spectral.hpp"

namespace netspectra {

struct RelaxationRates {
  std::vector<double> gammas;  ///< -2 ln|lambda|, ascending
  std::size_t excluded_zero = 0;  ///< eigenvalues with |lambda| == 0, skipped
};

RelaxationRates relaxation_rates(const SpectrumResult& spec);

/// Integrated density of states W(gamma) as a step function.
struct DensityCurve {
  std::vector<double> gammas;  ///< distinct relaxation rates, ascending
  std::vector<double> W;       ///< cumulative fraction at each gamma
  std::size_t n_lambda = 0;    ///< states with |lambda| >= lambda_min
};

/// W(gamma) = #{i : gamma_i <= gamma, |lambda_i| >= lambda_min} / N_lambda,
/// evaluated at each distinct gamma_i. Rates closer than `merge_tol` share
/// one step. Throws DataError when nothing survives the cutoff.
DensityCurve integrated_density(const SpectrumResult& spec, double lambda_min,
                                double merge_tol = 1e-9);

/// Number of eigenpairs with |lambda| > threshold, counting multiplicity.
/// Throws ParameterError when threshold is below the spectrum's cutoff.
std::size_t count_eigenvalues(const SpectrumResult& spec, double threshold);

struct DegeneracyCount {
  std::size_t m = 0;
  std::size_t count = 0;
};

/// For m = 1..m_max, the number of eigenvalues with ||lambda| - alpha/m| <= tol.
std::vector<DegeneracyCount> degeneracy_census(const SpectrumResult& spec, double alpha,
                                               std::size_t m_max, double tol = 1e-6);

struct WeylPoint {
  double n = 0.0;         ///< network size N
  double n_lambda = 0.0;  ///< eigenvalue count N_lambda
};

struct WeylFit {
  double nu = 0.0;
  double stderr_nu = 0.0;  ///< OLS standard error of the slope
  double intercept = 0.0;  ///< ln of the prefactor
  double threshold = 0.0;
  std::vector<WeylPoint> points;
};

/// Least-squares line through (ln N, ln N_lambda). Throws DataError for
/// fewer than two points, ParameterError for non-positive values.
WeylFit weyl_fit(std::span<const WeylPoint> points, double threshold);

/// d = 2 nu.
double dimension_from_nu(double nu);

}  // namespace netspectra
