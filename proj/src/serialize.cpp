#include "netspectra/serialize.hpp"

#include <array>
#include <charconv>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "netspectra/error.hpp"

namespace netspectra {

namespace {

constexpr const char* spectrum_format = "netspectra.spectrum/1";
constexpr std::array<char, 8> vector_magic = {'N', 'S', 'E', 'V', 'E', 'C', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "eigenvector files are written in native little-endian order");

SpectrumStatus status_from_string(const std::string& s) {
  if (s == "complete") return SpectrumStatus::complete;
  if (s == "partial") return SpectrumStatus::partial;
  if (s == "lower_bound") return SpectrumStatus::lower_bound;
  throw FormatError("unknown spectrum status: " + s);
}

template <typename T>
void write_raw(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("truncated eigenvector file");
  return value;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

Json spectrum_to_json(const SpectrumResult& spec) {
  Json values = Json::array();
  for (const auto& p : spec.pairs) {
    values.push_back({{"re", p.value.real()},
                      {"im", p.value.imag()},
                      {"residual", p.residual},
                      {"has_vector", !p.vector.empty()}});
  }
  return {{"format", spectrum_format},
          {"meta",
           {{"n", spec.n},
            {"alpha", spec.alpha},
            {"lambda_min", spec.lambda_min},
            {"source", spec.source},
            {"method", spec.method},
            {"tol", spec.tol},
            {"status", to_string(spec.status)},
            {"restarts", spec.restarts},
            {"missing_vectors", spec.missing_vectors}}},
          {"eigenvalues", std::move(values)}};
}

SpectrumFile spectrum_from_json(const Json& doc) {
  try {
    if (doc.at("format").get<std::string>() != spectrum_format) {
      throw FormatError("not a spectrum file (format " + doc.at("format").dump() + ")");
    }
    SpectrumFile file;
    file.meta = doc.at("meta");
    auto& spec = file.spectrum;
    spec.n = file.meta.at("n").get<std::size_t>();
    spec.alpha = file.meta.at("alpha").get<double>();
    spec.lambda_min = file.meta.at("lambda_min").get<double>();
    spec.source = file.meta.value("source", "");
    spec.method = file.meta.value("method", "");
    spec.tol = file.meta.value("tol", 0.0);
    spec.status = status_from_string(file.meta.value("status", "complete"));
    spec.restarts = file.meta.value("restarts", std::size_t{0});
    spec.missing_vectors = file.meta.value("missing_vectors", std::size_t{0});
    for (const auto& e : doc.at("eigenvalues")) {
      spec.pairs.push_back({{e.at("re").get<double>(), e.at("im").get<double>()},
                            {},
                            e.value("residual", 0.0)});
    }
    return file;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed spectrum JSON: ") + e.what());
  }
}

SpectrumFile load_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spectrum file: " + path);
  Json doc;
  try {
    in >> doc;
  } catch (const Json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return spectrum_from_json(doc);
}

void write_eigenvectors(std::ostream& out, const SpectrumResult& spec) {
  out.write(vector_magic.data(), vector_magic.size());
  write_raw<std::uint64_t>(out, spec.n);
  write_raw<std::uint64_t>(out, spec.pairs.size());
  const std::vector<double> zeros(2 * spec.n, 0.0);
  for (const auto& p : spec.pairs) {
    if (p.vector.empty()) {
      out.write(reinterpret_cast<const char*>(zeros.data()),
                static_cast<std::streamsize>(zeros.size() * sizeof(double)));
      continue;
    }
    if (p.vector.size() != spec.n) throw DataError("eigenvector length differs from n");
    for (const auto& x : p.vector) {
      write_raw(out, x.real());
      write_raw(out, x.imag());
    }
  }
  if (!out) throw Error("failed to write eigenvectors");
}

void read_eigenvectors(std::istream& in, SpectrumResult& spec) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != vector_magic) throw FormatError("not an eigenvector file");
  const auto n = read_raw<std::uint64_t>(in);
  const auto k = read_raw<std::uint64_t>(in);
  if (n != spec.n || k != spec.pairs.size()) {
    throw FormatError("eigenvector file shape (" + std::to_string(n) + " x " +
                      std::to_string(k) + ") does not match the spectrum");
  }
  std::vector<double> raw(2 * n);
  for (auto& p : spec.pairs) {
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(double)));
    if (!in) throw FormatError("truncated eigenvector file");
    bool any = false;
    for (double x : raw) any = any || x != 0.0;
    p.vector.clear();
    if (!any) continue;
    p.vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.vector[i] = {raw[2 * i], raw[2 * i + 1]};
  }
}

Json report_to_json(const ExtractionReport& report) {
  Json skipped = Json::array();
  for (const auto& s : report.skipped_files) {
    skipped.push_back({{"path", s.path}, {"reason", s.reason}});
  }
  return {{"n_procedures", report.n_procedures},
          {"n_calls", report.n_calls},
          {"n_files_scanned", report.n_files_scanned},
          {"skipped_files", std::move(skipped)},
          {"unresolved_call_names", report.unresolved_call_names},
          {"self_loops", "kept"},
          {"multi_edges", "collapsed"},
          {"limitations",
           "heuristic lexing; function-like macros are not expanded and calls through "
           "macros or function pointers are not resolved"}};
}

void write_growth_csv(std::ostream& out, const GrowthCurve& curve) {
  out << "l,mean_mass\n";
  for (std::size_t l = 0; l < curve.masses.size(); ++l) {
    out << l << ',' << format_double(curve.masses[l]) << '\n';
  }
}

void write_density_csv(std::ostream& out, const DensityCurve& curve) {
  out << "gamma,W\n";
  for (std::size_t i = 0; i < curve.gammas.size(); ++i) {
    out << format_double(curve.gammas[i]) << ',' << format_double(curve.W[i]) << '\n';
  }
}

void write_weyl_csv(std::ostream& out, const WeylFit& fit) {
  out << "N,N_lambda\n";
  for (const auto& p : fit.points) {
    out << format_double(p.n) << ',' << format_double(p.n_lambda) << '\n';
  }
}

Json weyl_to_json(const WeylFit& fit) {
  Json points = Json::array();
  for (const auto& p : fit.points) points.push_back({{"N", p.n}, {"N_lambda", p.n_lambda}});
  return {{"threshold", fit.threshold},
          {"nu", fit.nu},
          {"stderr", fit.stderr_nu},
          {"intercept", fit.intercept},
          {"d", 2.0 * fit.nu},
          {"points", std::move(points)}};
}

Json density_to_json(const DensityCurve& curve) {
  return {{"n_lambda", curve.n_lambda}, {"gamma", curve.gammas}, {"W", curve.W}};
}

void write_grid_csv(std::ostream& out, const CoarseGrid& grid) {
  for (std::size_t s = 0; s < grid.n_states; ++s) {
    for (std::size_t c = 0; c < grid.n_cells; ++c) {
      if (c) out << ',';
      out << format_double(grid.at(s, c));
    }
    out << '\n';
  }
}

Json grid_to_json(const CoarseGrid& grid) {
  Json rows = Json::array();
  for (const auto& v : grid.values_lambda) {
    rows.push_back({{"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}});
  }
  return {{"n_states", grid.n_states},
          {"n_cells", grid.n_cells},
          {"cell_size", grid.cell_size},
          {"rows", std::move(rows)}};
}

}  // namespace netspectra
