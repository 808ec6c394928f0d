#pragma once

#include <cstddef>
#include <span>

namespace netspectra {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope, sqrt(SSR / (n - 2) / Sxx); 0 for n == 2.
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Unweighted ordinary least squares y = intercept + slope * x.
/// Throws DataError for fewer than two points or constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace netspectra
