#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "netspectra/serialize.hpp"
#include "support.hpp"

using namespace netspectra;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "netspectra");
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

std::size_t count_lines(const std::string& text, bool skip_comments) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += !(skip_comments && !line.empty() && line[0] == '#');
  return n;
}

void write_graph(const fs::path& p, const DirectedGraph& g) {
  std::ofstream out(p);
  write_edge_list(out, g);
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("netspectra-cli-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

const fs::path fixtures = NETSPECTRA_FIXTURES;

}  // namespace

TEST_CASE("extract on a two-function tree") {
  Workspace ws;
  const auto r = run({"extract", (fixtures / "two").string(), "-o", ws / "pair"});
  REQUIRE(r.code == 0);
  CHECK(count_lines(slurp(ws / "pair.edges"), true) == 1);
  CHECK(slurp(ws / "pair.labels") == "0\tcaller\n1\tleaf\n");
  const auto report = read_json(ws / "pair.report.json");
  CHECK(report["n_procedures"] == 2);
  CHECK(report["n_calls"] == 1);
}

TEST_CASE("extract on an empty tree fails") {
  Workspace ws;
  fs::create_directories(ws.dir / "empty");
  const auto r = run({"extract", ws / "empty", "-o", ws / "none"});
  CHECK(r.code != 0);
  CHECK(r.err.find("no functions found") != std::string::npos);
}

TEST_CASE("extract reruns are byte-identical") {
  Workspace ws;
  REQUIRE(run({"extract", (fixtures / "corpus").string(), "-o", ws / "a"}).code == 0);
  REQUIRE(run({"extract", (fixtures / "corpus").string(), "-o", ws / "b"}).code == 0);
  for (const char* ext : {".edges", ".labels", ".report.json"}) {
    CHECK(slurp(ws / (std::string("a") + ext)) == slurp(ws / (std::string("b") + ext)));
  }
}

TEST_CASE("spectrum of the 3-cycle") {
  Workspace ws;
  write_graph(ws / "c3.edges", generate_cycle(3));
  const auto r = run({"spectrum", ws / "c3.edges", "-o", ws / "c3.json"});
  REQUIRE(r.code == 0);
  const auto doc = read_json(ws / "c3.json");
  CHECK(doc["eigenvalues"].size() == 3);
  CHECK(doc["meta"]["config"]["alpha"] == 0.85);
  CHECK(doc["meta"]["config"]["krylov_dim"] == 600);
  CHECK(doc["meta"]["status"] == "complete");
  CHECK(doc["degeneracy"].size() == 6);

  const auto dense = run({"spectrum", ws / "c3.edges", "--dense", "-o", ws / "c3d.json"});
  REQUIRE(dense.code == 0);
  const auto d = read_json(ws / "c3d.json");
  CHECK(d["meta"]["method"] == "dense");
  CHECK(d["eigenvalues"].size() == 3);
}

TEST_CASE("spectrum with --inverted has the same eigenvalues") {
  Workspace ws;
  const auto g = testing::random_graph(40, 1.5, 12);
  write_graph(ws / "g.edges", g);
  REQUIRE(run({"spectrum", ws / "g.edges", "--dense", "-o", ws / "fwd.json"}).code == 0);
  REQUIRE(run({"spectrum", ws / "g.edges", "--dense", "--inverted", "-o", ws / "inv.json"}).code == 0);
  const auto fwd = load_spectrum_file(ws / "fwd.json").spectrum;
  const auto inv = load_spectrum_file(ws / "inv.json").spectrum;
  // G and G* need not share a spectrum in general; compare against the
  // dense oracle of the inverted graph instead.
  const auto oracle = dense_spectrum(invert_links(g), 0.85);
  const auto m = testing::greedy_match(testing::values_above(inv, 0.1),
                                       testing::values_above(oracle, 0.1));
  CHECK(m.same_count);
  CHECK(m.worst < 1e-12);
  CHECK(read_json(ws / "inv.json")["meta"]["inverted"] == true);
  CHECK(fwd.pairs.size() > 0);
}

TEST_CASE("spectrum with vectors feeds eigenstates") {
  Workspace ws;
  std::vector<Edge> edges;
  for (NodeId i = 0; i < 6; ++i) edges.push_back({i, static_cast<NodeId>((i + 1) % 6)});
  {
    std::ofstream out(ws / "c6.edges");
    write_edge_list(out, DirectedGraph(10, edges));
  }
  REQUIRE(run({"spectrum", ws / "c6.edges", "--krylov", "10", "--vectors", ws / "c6.vec", "-o",
               ws / "c6.json"})
              .code == 0);
  const auto r = run({"eigenstates", "--spectrum", ws / "c6.json", "--vectors", ws / "c6.vec",
                      "--edges", ws / "c6.edges", "--cells", "5", "-o", ws / "es"});
  REQUIRE(r.code == 0);
  CHECK(count_lines(slurp(ws / "es.grid.csv"), false) ==
        read_json(ws / "es.json")["grid"]["n_states"].get<std::size_t>());
  const auto par = slurp(ws / "es.par.csv");
  CHECK(par.rfind("re,im,abs,xi\n", 0) == 0);

  // More cells than nodes: clamped with a warning, still success.
  const auto clamped = run({"eigenstates", "--spectrum", ws / "c6.json", "--vectors", ws / "c6.vec",
                            "--order", "identity", "-o", ws / "es_b"});
  CHECK(clamped.code == 0);
  CHECK(clamped.err.find("warning") != std::string::npos);
  CHECK(read_json(ws / "es_b.json")["grid"]["n_cells"] == 10);
}

TEST_CASE("pagerank command") {
  Workspace ws;
  write_graph(ws / "chain.edges", generate_chain(2));
  REQUIRE(run({"pagerank", ws / "chain.edges", "-o", ws / "pr.csv"}).code == 0);
  std::istringstream in(slurp(ws / "pr.csv"));
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(header == "rank,node,label,probability");
  CHECK(first.rfind("0,1,1,", 0) == 0);
  CHECK(std::abs(std::stod(first.substr(6)) - 0.925 / 1.425) < 1e-12);
}

TEST_CASE("weyl command") {
  Workspace ws;
  std::vector<std::string> files;
  for (std::size_t n : {30u, 60u}) {
    const auto path = ws / ("s" + std::to_string(n) + ".json");
    write_graph(ws / "g.edges", testing::random_graph(n, 1.3, n));
    REQUIRE(run({"spectrum", ws / "g.edges", "--dense", "-o", path}).code == 0);
    files.push_back(path);
  }
  std::vector<std::string> args{"weyl"};
  args.insert(args.end(), files.begin(), files.end());
  args.insert(args.end(), {"--density", "-o", ws / "w"});
  const auto r = run(args);
  REQUIRE(r.code == 0);
  const auto doc = read_json(ws / "w.json");
  REQUIRE(doc["fits"].size() == 2);
  CHECK(doc["fits"][0]["threshold"] == 0.25);
  CHECK(doc["fits"][1]["threshold"] == 0.1);
  CHECK(doc["fits"][0]["stderr"] == 0.0);
  CHECK(doc["density"].size() == 2);
  CHECK(count_lines(slurp(ws / "w.csv"), false) == 5);

  const auto one = run({"weyl", files[0], "-o", ws / "w1"});
  CHECK(one.code != 0);
  const auto bad = run({"weyl", files[0], files[1], "--threshold", "1.5", "-o", ws / "w2"});
  CHECK(bad.code != 0);
}

TEST_CASE("dimension command") {
  Workspace ws;
  write_graph(ws / "chain.edges", generate_chain(1000));
  const auto r = run({"dimension", ws / "chain.edges", "--lmax", "12", "--fit-range", "2:8", "-o",
                      ws / "d"});
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const auto doc = read_json(ws / "d.json");
  CHECK(doc["growth"]["fit"]["l_lo"] == 2);
  CHECK(doc["growth"]["fit"]["l_hi"] == 8);
  CHECK(doc["config"]["l_max"] == 12);
  CHECK(count_lines(slurp(ws / "d.csv"), false) == 14);

  write_graph(ws / "small.edges", generate_cycle(8));
  const auto sat = run({"dimension", ws / "small.edges", "-o", ws / "s"});
  CHECK(sat.code == 0);
  CHECK(sat.err.find("saturated") != std::string::npos);

  const auto inv = run({"dimension", ws / "chain.edges", "--compare-inverted", "-o", ws / "ci"});
  CHECK(inv.code == 0);
  CHECK(read_json(ws / "ci.json")["inverted_comparison"]["max_abs_difference"] == 0.0);

  CHECK(run({"dimension", ws / "chain.edges", "--fit-range", "5:2", "-o", ws / "x"}).code != 0);
  CHECK(run({"dimension", ws / "chain.edges", "--fit-range", "1:40", "-o", ws / "x"}).code != 0);
}

TEST_CASE("generate and parameter errors") {
  Workspace ws;
  REQUIRE(run({"generate", "grid", "--width", "3", "--height", "2", "-o", ws / "g.edges"}).code == 0);
  std::ifstream in(ws / "g.edges");
  CHECK(load_edge_list(in) == generate_grid(3, 2));
  REQUIRE(run({"generate", "preferential", "-n", "50", "-m", "2", "--seed", "4", "-o", ws / "p.edges"})
              .code == 0);
  std::ifstream pin(ws / "p.edges");
  CHECK(load_edge_list(pin) == generate_preferential(50, 2, 4));

  CHECK(run({"generate", "grid", "-o", ws / "x"}).code != 0);
  CHECK(run({"spectrum", ws / "g.edges", "--alpha", "1.0", "-o", ws / "x.json"}).code != 0);
  CHECK(run({"spectrum", ws / "g.edges", "--lambda-min", "0", "-o", ws / "x.json"}).code != 0);
  CHECK(run({"nonsense"}).code != 0);
}
