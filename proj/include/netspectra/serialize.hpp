#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "netspectra/callgraph.hpp"
#include "netspectra/eigenstates.hpp"
#include "netspectra/fracdim.hpp"
#include "netspectra/spectral.hpp"
#include "netspectra/weyl.hpp"

namespace netspectra {

using Json = nlohmann::json;

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

// Spectrum JSON:
//   {"format": "netspectra.spectrum/1",
//    "meta": {"n", "alpha", "lambda_min", "source", "method", "tol", "status",
//             "restarts", "missing_vectors", ...},
//    "eigenvalues": [{"re", "im", "residual", "has_vector"}, ...]}
// Eigenvalues appear in descending |lambda|. Extra keys under "meta" are
// preserved by the reader (see SpectrumFile::meta).
Json spectrum_to_json(const SpectrumResult& spec);

struct SpectrumFile {
  SpectrumResult spectrum;
  Json meta;
};
SpectrumFile spectrum_from_json(const Json& doc);
SpectrumFile load_spectrum_file(const std::string& path);

// Eigenvector matrix, little-endian binary:
//   8 bytes magic "NSEVEC01", uint64 n, uint64 k,
//   then k columns of n (re, im) float64 pairs, one column per eigenpair in
//   spectrum order. Pairs without a vector are written as zero columns.
void write_eigenvectors(std::ostream& out, const SpectrumResult& spec);
/// Attaches the columns to `spec.pairs` (zero columns stay empty).
void read_eigenvectors(std::istream& in, SpectrumResult& spec);

Json report_to_json(const ExtractionReport& report);

/// Two columns: l, mean_mass.
void write_growth_csv(std::ostream& out, const GrowthCurve& curve);
/// Two columns: gamma, W.
void write_density_csv(std::ostream& out, const DensityCurve& curve);
/// Two columns: N, N_lambda.
void write_weyl_csv(std::ostream& out, const WeylFit& fit);
Json weyl_to_json(const WeylFit& fit);
Json density_to_json(const DensityCurve& curve);

/// CSV matrix, one row per state, one column per cell.
void write_grid_csv(std::ostream& out, const CoarseGrid& grid);
/// Sidecar: geometry and the eigenvalue of every row.
Json grid_to_json(const CoarseGrid& grid);

}  // namespace netspectra
