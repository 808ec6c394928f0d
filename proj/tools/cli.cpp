#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "netspectra/callgraph.hpp"
#include "netspectra/eigenstates.hpp"
#include "netspectra/error.hpp"
#include "netspectra/fracdim.hpp"
#include "netspectra/google_matrix.hpp"
#include "netspectra/graph.hpp"
#include "netspectra/serialize.hpp"
#include "netspectra/spectral.hpp"
#include "netspectra/weyl.hpp"

namespace netspectra::cli {

using nlohmann::json;

json config_to_json(const RunConfig& c) {
  return {{"alpha", c.alpha},
          {"lambda_min", c.lambda_min},
          {"krylov_dim", c.krylov_dim},
          {"tol", c.tol},
          {"seed", c.seed},
          {"max_restarts", c.max_restarts},
          {"l_max", c.l_max},
          {"fit_range", {c.fit_lo, c.fit_hi}},
          {"cells", c.n_cells},
          {"max_states", c.max_states},
          {"thresholds", c.thresholds}};
}

namespace {

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body,
                bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::openmode{});
  if (!out) throw Error("cannot write " + path);
  body(out);
  out.flush();
  if (!out) throw Error("failed while writing " + path);
}

void write_json(const std::string& path, const json& doc) {
  write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

// "lo:hi" with 1 <= lo < hi.
std::string parse_fit_range(const std::string& text, RunConfig& config) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return "fit range must be lo:hi";
  try {
    std::size_t used = 0;
    const auto lo = std::stoull(text.substr(0, colon), &used);
    if (used != colon) return "fit range must be lo:hi";
    const std::string tail = text.substr(colon + 1);
    const auto hi = std::stoull(tail, &used);
    if (used != tail.size()) return "fit range must be lo:hi";
    if (lo < 1 || hi <= lo) return "fit range needs 1 <= lo < hi";
    config.fit_lo = lo;
    config.fit_hi = hi;
  } catch (const std::exception&) {
    return "fit range must be lo:hi";
  }
  return {};
}

DirectedGraph load_graph(const std::string& edges, const std::string& labels) {
  DirectedGraph g = load_edge_list_file(edges);
  if (!labels.empty()) g = attach_labels_file(g, labels);
  if (g.empty()) throw EmptyGraphError("edge list " + edges + " has no nodes");
  return g;
}

void add_alpha(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--alpha", c.alpha, "damping factor")->check([](const std::string& s) {
    const double a = std::stod(s);
    return a > 0.0 && a < 1.0 ? std::string{} : std::string("alpha must lie in (0, 1)");
  });
}

void add_lambda_min(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--lambda-min", c.lambda_min, "modulus cutoff")->check([](const std::string& s) {
    const double v = std::stod(s);
    return v > 0.0 && v < 1.0 ? std::string{} : std::string("lambda-min must lie in (0, 1)");
  });
}

struct Options {
  RunConfig config;
  // generate
  std::string kind;
  std::size_t n = 0;
  std::size_t m = 1;
  std::size_t width = 0;
  std::size_t height = 0;
  // shared
  std::string input;
  std::vector<std::string> inputs;
  std::string labels;
  std::string out;
  std::string source;
  std::string vectors;
  std::string spectrum;
  std::string order = "pagerank";
  std::string fit_range;
  bool inverted = false;
  bool dense = false;
  bool undirected = false;
  bool compare_inverted = false;
  bool density = false;
  std::size_t zoom_cells = 0;
  std::size_t cell_size = 0;
  std::vector<std::string> extensions{".c", ".h"};
};

int cmd_generate(const Options& o, std::ostream& out) {
  DirectedGraph g;
  if (o.kind == "chain") {
    g = generate_chain(o.n);
  } else if (o.kind == "cycle") {
    g = generate_cycle(o.n);
  } else if (o.kind == "grid") {
    g = generate_grid(o.width, o.height);
  } else {
    g = generate_preferential(o.n, o.m, o.config.seed);
  }
  write_file(o.out, [&](std::ostream& s) { write_edge_list(s, g); });
  out << "wrote " << o.out << " (" << g.size() << " nodes, " << g.edge_count() << " edges)\n";
  return 0;
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  ExtractOptions options;
  options.extensions = o.extensions;
  const ExtractedNetwork net = extract_pcn(o.input, options);
  write_file(o.out + ".edges", [&](std::ostream& s) { write_edge_list(s, net.graph); });
  write_file(o.out + ".labels", [&](std::ostream& s) { write_labels(s, net.graph); });
  write_json(o.out + ".report.json", report_to_json(net.report));
  for (const auto& skipped : net.report.skipped_files) {
    err << "warning: skipped " << skipped.path << ": " << skipped.reason << '\n';
  }
  out << net.report.n_procedures << " procedures, " << net.report.n_calls << " calls\n";
  return 0;
}

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig& c = o.config;
  DirectedGraph g = load_graph(o.input, o.labels);
  if (o.inverted) g = invert_links(g);

  SpectrumResult spec;
  if (o.dense) {
    spec = dense_spectrum(g, c.alpha);
    std::erase_if(spec.pairs, [&](const EigenPair& p) { return std::abs(p.value) < c.lambda_min; });
    spec.lambda_min = c.lambda_min;
  } else {
    const GoogleOperator op(g, c.alpha);
    ArnoldiOptions a;
    a.lambda_min = c.lambda_min;
    a.krylov_dim = c.krylov_dim;
    a.tol = c.tol;
    a.max_restarts = c.max_restarts;
    a.seed = c.seed;
    a.keep_vectors = !o.vectors.empty();
    spec = arnoldi_spectrum(op, a);
  }
  spec.source = o.source.empty() ? std::filesystem::path(o.input).filename().string() : o.source;

  json doc = spectrum_to_json(spec);
  doc["meta"]["inverted"] = o.inverted;
  doc["meta"]["input"] = o.input;
  doc["meta"]["config"] = config_to_json(c);
  json census = json::array();
  for (const auto& d : degeneracy_census(spec, c.alpha, 6)) {
    census.push_back({{"m", d.m}, {"lambda", c.alpha / static_cast<double>(d.m)}, {"count", d.count}});
  }
  doc["degeneracy"] = std::move(census);
  write_json(o.out, doc);
  if (!o.vectors.empty()) {
    write_file(o.vectors, [&](std::ostream& s) { write_eigenvectors(s, spec); }, true);
  }

  if (spec.status != SpectrumStatus::complete) {
    err << "warning: spectrum status " << to_string(spec.status)
        << (spec.status == SpectrumStatus::partial
                ? " (unconverged eigenvalues above the cutoff remain; raise --krylov)"
                : " (restart budget exhausted; multiplicities are lower bounds)")
        << '\n';
  }
  if (spec.missing_vectors > 0) {
    err << "warning: " << spec.missing_vectors
        << " eigenvalues reported without an eigenvector (defective or ill-conditioned)\n";
  }
  out << spec.pairs.size() << " eigenvalues with |lambda| >= " << spec.lambda_min << " (n = " << spec.n
      << ")\n";
  return 0;
}

int cmd_pagerank(const Options& o, std::ostream& out) {
  DirectedGraph g = load_graph(o.input, o.labels);
  if (o.inverted) g = invert_links(g);
  const GoogleOperator op(g, o.config.alpha);
  const PageRankVector p = pagerank(op);
  const auto order = order_by_pagerank(p);
  write_file(o.out, [&](std::ostream& s) {
    s << "rank,node,label,probability\n";
    for (std::size_t r = 0; r < order.size(); ++r) {
      s << r << ',' << order[r] << ',' << g.label(order[r]) << ','
        << format_double(p.probabilities[order[r]]) << '\n';
    }
  });
  out << "PageRank converged in " << p.iterations << " iterations (L1 change " << p.residual << ")\n";
  return 0;
}

int cmd_weyl(const Options& o, std::ostream& out) {
  const RunConfig& c = o.config;
  std::vector<SpectrumFile> files;
  for (const auto& path : o.inputs) files.push_back(load_spectrum_file(path));

  json fits = json::array();
  std::ostringstream csv;
  csv << "threshold,file,N,N_lambda\n";
  for (double threshold : c.thresholds) {
    std::vector<WeylPoint> points;
    for (std::size_t f = 0; f < files.size(); ++f) {
      const auto& spec = files[f].spectrum;
      const auto count = count_eigenvalues(spec, threshold);
      points.push_back({static_cast<double>(spec.n), static_cast<double>(count)});
      csv << format_double(threshold) << ',' << o.inputs[f] << ',' << spec.n << ',' << count << '\n';
    }
    json fit = weyl_to_json(weyl_fit(points, threshold));
    fits.push_back(std::move(fit));
  }
  json files_json = json::array();
  for (std::size_t f = 0; f < files.size(); ++f) {
    files_json.push_back({{"path", o.inputs[f]},
                          {"n", files[f].spectrum.n},
                          {"status", to_string(files[f].spectrum.status)}});
  }
  json doc = {{"fits", std::move(fits)}, {"inputs", std::move(files_json)},
              {"config", config_to_json(c)}};

  if (o.density) {
    json curves = json::array();
    for (std::size_t f = 0; f < files.size(); ++f) {
      const auto& spec = files[f].spectrum;
      json curve = density_to_json(integrated_density(spec, spec.lambda_min));
      curve["path"] = o.inputs[f];
      curves.push_back(std::move(curve));
    }
    doc["density"] = std::move(curves);
  }
  write_json(o.out + ".json", doc);
  write_file(o.out + ".csv", [&](std::ostream& s) { s << csv.str(); });
  for (const auto& fit : doc["fits"]) {
    out << "threshold " << fit["threshold"].get<double>() << ": nu = " << fit["nu"].get<double>()
        << " +- " << fit["stderr"].get<double>() << ", d = " << fit["d"].get<double>() << '\n';
  }
  return 0;
}

json growth_to_json(const GrowthCurve& curve, const DimensionFit& fit) {
  return {{"masses", curve.masses},
          {"n_seeds", curve.n_seeds},
          {"n_nodes", curve.n_nodes},
          {"fit",
           {{"d", fit.d},
            {"stderr", fit.stderr_d},
            {"l_lo", fit.l_lo},
            {"l_hi", fit.l_hi},
            {"saturated", fit.saturated}}}};
}

int cmd_dimension(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig& c = o.config;
  if (c.fit_hi > c.l_max) throw ParameterError("fit range exceeds --lmax");
  DirectedGraph g = load_graph(o.input, o.labels);
  if (o.inverted) g = invert_links(g);

  json doc = {{"config", config_to_json(c)}, {"input", o.input}, {"inverted", o.inverted}};
  GrowthCurve curve;
  DimensionFit fit;
  if (o.undirected) {
    const auto result = undirected_dimension(g, c.l_max, c.fit_lo, c.fit_hi);
    curve = result.curve;
    fit = result.fit;
    doc["mode"] = "undirected";
  } else {
    curve = average_mass(g, c.l_max);
    fit = dimension_fit(curve, c.fit_lo, c.fit_hi);
    doc["mode"] = "directed";
    if (o.compare_inverted) {
      const auto cmp = compare_inverted(g, curve);
      doc["inverted_comparison"] = {{"masses", cmp.inverted.masses},
                                    {"max_abs_difference", cmp.max_abs_difference}};
    }
  }
  doc["growth"] = growth_to_json(curve, fit);
  write_json(o.out + ".json", doc);
  write_file(o.out + ".csv", [&](std::ostream& s) { write_growth_csv(s, curve); });
  if (fit.saturated) {
    err << "warning: mean cluster mass at l = " << fit.l_hi
        << " exceeds half the network; the fit window is saturated\n";
  }
  out << "d = " << fit.d << " +- " << fit.stderr_d << " over l in [" << fit.l_lo << ", "
      << fit.l_hi << "]\n";
  return 0;
}

std::vector<NodeId> read_order_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open order file: " + path);
  std::vector<NodeId> order;
  std::uint64_t v = 0;
  while (in >> v) {
    if (v >= n) throw ParameterError("order file entry out of range: " + std::to_string(v));
    order.push_back(static_cast<NodeId>(v));
  }
  if (!in.eof()) throw FormatError("order file must hold one node index per line");
  return order;
}

int cmd_eigenstates(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig& c = o.config;
  SpectrumFile file = load_spectrum_file(o.spectrum);
  SpectrumResult& spec = file.spectrum;
  {
    std::ifstream in(o.vectors, std::ios::binary);
    if (!in) throw Error("cannot open eigenvector file: " + o.vectors);
    read_eigenvectors(in, spec);
  }

  std::vector<NodeId> order;
  if (o.order == "pagerank") {
    if (o.input.empty()) throw ParameterError("--order pagerank needs --edges");
    DirectedGraph g = load_edge_list_file(o.input);
    if (file.meta.value("inverted", false)) g = invert_links(g);
    if (g.size() != spec.n) throw DataError("edge list size differs from the spectrum's n");
    order = order_by_pagerank(pagerank(GoogleOperator(g, spec.alpha)));
  } else if (o.order == "identity") {
    order.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) order[i] = static_cast<NodeId>(i);
  } else {
    order = read_order_file(o.order, spec.n);
  }

  const ParProfile par = par_profile(spec);
  write_file(o.out + ".par.csv", [&](std::ostream& s) {
    s << "re,im,abs,xi\n";
    for (const auto& e : par.entries) {
      s << format_double(e.value.real()) << ',' << format_double(e.value.imag()) << ','
        << format_double(std::abs(e.value)) << ',' << format_double(e.xi) << '\n';
    }
  });

  const std::size_t cells = std::min(c.n_cells, spec.n);
  if (cells < c.n_cells) {
    err << "warning: --cells " << c.n_cells << " exceeds n = " << spec.n << "; using " << cells << '\n';
  }
  const CoarseGrid grid = coarse_grain(spec, order, cells, c.max_states);
  write_file(o.out + ".grid.csv", [&](std::ostream& s) { write_grid_csv(s, grid); });
  json doc = {{"config", config_to_json(c)},
              {"spectrum", o.spectrum},
              {"order", o.order},
              {"par", {{"mean_all", par.mean_all},
                       {"mean_representatives", par.mean_representatives},
                       {"states", par.entries.size()}}},
              {"grid", grid_to_json(grid)}};
  if (o.zoom_cells > 0 || o.cell_size > 0) {
    if (o.zoom_cells == 0 || o.cell_size == 0) {
      throw ParameterError("zoom needs both --zoom-cells and --cell-size");
    }
    const CoarseGrid zoom = zoom_grid(spec, order, o.zoom_cells, o.cell_size, c.max_states);
    write_file(o.out + ".zoom.csv", [&](std::ostream& s) { write_grid_csv(s, zoom); });
    doc["zoom"] = grid_to_json(zoom);
  }
  write_json(o.out + ".json", doc);
  out << par.entries.size() << " eigenstates, mean xi = " << par.mean_all << "; grid "
      << grid.n_states << " x " << grid.n_cells << " (cell size " << grid.cell_size << ")\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  RunConfig& c = o.config;
  CLI::App app{"Spectral analysis of directed networks and procedure call graphs", "netspectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "netspectra 0.1.0");

  auto* generate = app.add_subcommand("generate", "write a synthetic graph as an edge list");
  generate->add_option("kind", o.kind, "chain | cycle | grid | preferential")
      ->required()
      ->check(CLI::IsMember({"chain", "cycle", "grid", "preferential"}));
  generate->add_option("-n,--nodes", o.n, "node count (chain, cycle, preferential)");
  generate->add_option("-m,--links", o.m, "links per new node (preferential)")->check(CLI::PositiveNumber);
  generate->add_option("--width", o.width, "grid width");
  generate->add_option("--height", o.height, "grid height");
  generate->add_option("--seed", c.seed, "random seed");
  generate->add_option("-o,--out", o.out, "output edge list")->required();

  auto* extract = app.add_subcommand("extract", "build the procedure call network of a C source tree");
  extract->add_option("root", o.input, "source tree")->required()->check(CLI::ExistingDirectory);
  extract->add_option("--ext", o.extensions, "file extensions to scan")->delimiter(',');
  extract->add_option("-o,--out", o.out, "output prefix")->required();

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the Google matrix above a cutoff");
  spectrum->add_option("edges", o.input, "edge list")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--labels", o.labels, "index<TAB>label file")->check(CLI::ExistingFile);
  add_alpha(spectrum, c);
  add_lambda_min(spectrum, c);
  spectrum->add_option("--krylov", c.krylov_dim, "Krylov basis size")->check(CLI::Range(2, 1 << 20));
  spectrum->add_option("--tol", c.tol, "residual tolerance")->check(CLI::PositiveNumber);
  spectrum->add_option("--seed", c.seed, "random seed for start vectors");
  spectrum->add_option("--max-restarts", c.max_restarts, "restart budget")->check(CLI::PositiveNumber);
  spectrum->add_flag("--inverted", o.inverted, "reverse every link (spectrum of G*)");
  spectrum->add_flag("--dense", o.dense, "dense eigendecomposition (n <= 2000)");
  spectrum->add_option("--vectors", o.vectors, "also write eigenvectors to this binary file");
  spectrum->add_option("--source", o.source, "source label stored in the output");
  spectrum->add_option("-o,--out", o.out, "output JSON")->required();

  auto* pr = app.add_subcommand("pagerank", "PageRank vector and ranking");
  pr->add_option("edges", o.input, "edge list")->required()->check(CLI::ExistingFile);
  pr->add_option("--labels", o.labels, "index<TAB>label file")->check(CLI::ExistingFile);
  add_alpha(pr, c);
  pr->add_flag("--inverted", o.inverted, "reverse every link");
  pr->add_option("-o,--out", o.out, "output CSV")->required();

  auto* weyl = app.add_subcommand("weyl", "fractal Weyl exponent from a family of spectra");
  weyl->add_option("spectra", o.inputs, "spectrum JSON files")->required()->check(CLI::ExistingFile);
  weyl->add_option("--threshold", c.thresholds, "modulus thresholds (repeatable)");
  weyl->add_flag("--density", o.density, "include W(gamma) of every input");
  weyl->add_option("-o,--out", o.out, "output prefix")->required();

  auto* dim = app.add_subcommand("dimension", "cluster-growing fractal dimension");
  dim->add_option("edges", o.input, "edge list")->required()->check(CLI::ExistingFile);
  dim->add_option("--lmax", c.l_max, "largest distance")->check(CLI::PositiveNumber);
  dim->add_option("--fit-range", o.fit_range, "fit window lo:hi (default 1:10)");
  dim->add_flag("--undirected", o.undirected, "ignore link directions");
  dim->add_flag("--inverted", o.inverted, "reverse every link");
  dim->add_flag("--compare-inverted", o.compare_inverted, "also report the inverted-graph curve");
  dim->add_option("-o,--out", o.out, "output prefix")->required();

  auto* eig = app.add_subcommand("eigenstates", "participation ratios and coarse-grained eigenstates");
  eig->add_option("--spectrum", o.spectrum, "spectrum JSON")->required()->check(CLI::ExistingFile);
  eig->add_option("--vectors", o.vectors, "eigenvector file")->required()->check(CLI::ExistingFile);
  eig->add_option("--edges", o.input, "edge list (for the PageRank order)");
  eig->add_option("--order", o.order, "pagerank | identity | file of node indices");
  eig->add_option("--cells", c.n_cells, "cells of the full grid")->check(CLI::PositiveNumber);
  eig->add_option("--max-states", c.max_states, "rows of the grid")->check(CLI::PositiveNumber);
  eig->add_option("--zoom-cells", o.zoom_cells, "cells of the zoom window");
  eig->add_option("--cell-size", o.cell_size, "sites per zoom cell");
  eig->add_option("-o,--out", o.out, "output prefix")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (!o.fit_range.empty()) {
      const std::string problem = parse_fit_range(o.fit_range, c);
      if (!problem.empty()) throw CLI::ValidationError("--fit-range", problem);
    }
    for (double t : c.thresholds) {
      if (!(t > 0.0 && t < 1.0)) throw CLI::ValidationError("--threshold", "thresholds must lie in (0, 1)");
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*generate) {
      if (o.kind == "grid" && (o.width == 0 || o.height == 0)) {
        throw ParameterError("grid needs --width and --height");
      }
      return cmd_generate(o, out);
    }
    if (*extract) return cmd_extract(o, out, err);
    if (*spectrum) return cmd_spectrum(o, out, err);
    if (*pr) return cmd_pagerank(o, out);
    if (*weyl) return cmd_weyl(o, out);
    if (*dim) return cmd_dimension(o, out, err);
    if (*eig) return cmd_eigenstates(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace netspectra::cli
