#include <doctest.h>

#include <random>
#include <sstream>

#include "netspectra/error.hpp"
#include "netspectra/serialize.hpp"
#include "support.hpp"

using namespace netspectra;
using cd = std::complex<double>;

TEST_CASE("format_double round trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.425) == "-0.425");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = dist(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("spectrum JSON round trip") {
  const auto g = testing::random_graph(40, 1.5, 2);
  ArnoldiOptions opt;
  auto spec = arnoldi_spectrum(build_operator(g, 0.85), opt);
  spec.source = "random-40";
  const Json doc = spectrum_to_json(spec);
  CHECK(doc["format"] == "netspectra.spectrum/1");
  CHECK(doc["meta"]["n"] == 40);
  CHECK(doc["meta"]["source"] == "random-40");
  CHECK(doc["meta"]["status"] == "complete");

  const auto back = spectrum_from_json(Json::parse(doc.dump()));
  REQUIRE(back.spectrum.pairs.size() == spec.pairs.size());
  for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
    CHECK(back.spectrum.pairs[i].value == spec.pairs[i].value);
    CHECK(back.spectrum.pairs[i].residual == spec.pairs[i].residual);
  }
  CHECK(back.spectrum.alpha == spec.alpha);
  CHECK(back.spectrum.lambda_min == spec.lambda_min);
  CHECK(back.spectrum.tol == spec.tol);
  CHECK(back.spectrum.method == "arnoldi");
  CHECK(back.meta["source"] == "random-40");
}

TEST_CASE("spectrum JSON rejects malformed documents") {
  CHECK_THROWS_AS(spectrum_from_json(Json::parse("{}")), FormatError);
  CHECK_THROWS_AS(spectrum_from_json(Json::parse(R"({"format": "other/1"})")), FormatError);
  Json doc = spectrum_to_json(dense_spectrum(generate_cycle(3), 0.85));
  doc["eigenvalues"][0].erase("re");
  CHECK_THROWS_AS(spectrum_from_json(doc), FormatError);
}

TEST_CASE("eigenvector binary round trip") {
  auto spec = dense_spectrum(testing::random_graph(25, 1.4, 3), 0.85);
  spec.pairs[2].vector.clear();
  std::stringstream buffer;
  write_eigenvectors(buffer, spec);
  CHECK(buffer.str().size() == 8 + 16 + spec.pairs.size() * 25 * 16);

  SpectrumResult back = spec;
  for (auto& p : back.pairs) p.vector.clear();
  read_eigenvectors(buffer, back);
  for (std::size_t i = 0; i < spec.pairs.size(); ++i) CHECK(back.pairs[i].vector == spec.pairs[i].vector);
  CHECK(back.pairs[2].vector.empty());
}

TEST_CASE("eigenvector file shape is checked") {
  const auto spec = dense_spectrum(generate_cycle(4), 0.85);
  std::stringstream buffer;
  write_eigenvectors(buffer, spec);
  auto other = dense_spectrum(generate_cycle(5), 0.85);
  CHECK_THROWS_AS(read_eigenvectors(buffer, other), FormatError);

  std::stringstream garbage("NOTMAGIC");
  auto same = spec;
  CHECK_THROWS_AS(read_eigenvectors(garbage, same), FormatError);

  std::string truncated;
  {
    std::stringstream full;
    write_eigenvectors(full, spec);
    truncated = full.str().substr(0, 40);
  }
  std::stringstream cut(truncated);
  CHECK_THROWS_AS(read_eigenvectors(cut, same), FormatError);
}

TEST_CASE("csv writers") {
  GrowthCurve curve;
  curve.masses = {1.0, 2.5, 3.25};
  std::ostringstream growth;
  write_growth_csv(growth, curve);
  CHECK(growth.str() == "l,mean_mass\n0,1\n1,2.5\n2,3.25\n");

  WeylFit fit;
  fit.points = {{1000.0, 12.0}, {2000.0, 19.0}};
  std::ostringstream weyl;
  write_weyl_csv(weyl, fit);
  CHECK(weyl.str() == "N,N_lambda\n1000,12\n2000,19\n");

  DensityCurve w;
  w.gammas = {0.0, 0.1};
  w.W = {0.5, 1.0};
  w.n_lambda = 2;
  std::ostringstream density;
  write_density_csv(density, w);
  CHECK(density.str() == "gamma,W\n0,0.5\n0.1,1\n");

  CoarseGrid grid;
  grid.n_states = 2;
  grid.n_cells = 2;
  grid.cell_size = 3;
  grid.values = {0.25, 0.75, 1.0, 0.0};
  grid.values_lambda = {1.0, cd(0.0, 0.5)};
  std::ostringstream csv;
  write_grid_csv(csv, grid);
  CHECK(csv.str() == "0.25,0.75\n1,0\n");
  const Json meta = grid_to_json(grid);
  CHECK(meta["n_cells"] == 2);
  CHECK(meta["cell_size"] == 3);
  CHECK(meta["rows"][1]["im"] == 0.5);
}

TEST_CASE("extraction report JSON") {
  ExtractionReport r;
  r.n_procedures = 3;
  r.n_calls = 2;
  r.n_files_scanned = 4;
  r.unresolved_call_names = 1;
  r.skipped_files.push_back({"bad.c", "unbalanced braces"});
  const Json doc = report_to_json(r);
  CHECK(doc["n_procedures"] == 3);
  CHECK(doc["n_calls"] == 2);
  CHECK(doc["skipped_files"][0]["path"] == "bad.c");
  CHECK(doc["unresolved_call_names"] == 1);
}
