#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "netspectra/callgraph.hpp"
#include "netspectra/error.hpp"

using namespace netspectra;
namespace fs = std::filesystem;

namespace {

std::set<std::pair<std::string, std::string>> labeled_edges(const DirectedGraph& g) {
  std::set<std::pair<std::string, std::string>> s;
  for (const Edge& e : g.edges()) s.insert({g.label(e.src), g.label(e.dst)});
  return s;
}

ExtractedNetwork extract_one(const std::string& text) {
  return extract_pcn_sources({{"unit.c", text}});
}

std::vector<std::string> names(const std::vector<FunctionDefinition>& defs) {
  std::vector<std::string> out;
  for (const auto& d : defs) out.push_back(d.name);
  return out;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("netspectra-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("strip_noise blanks comments and literals in place") {
  CHECK(strip_noise("a /* x */ b") == "a         b");
  CHECK(strip_noise("\"f()\"") == "     ");
  CHECK(strip_noise("#define CALL g()\nx") == std::string(16, ' ') + "\nx");
  CHECK(strip_noise("x // y()\nz") == "x       \nz");
  CHECK(strip_noise("c = '(';") == "c =    ;");
  CHECK(strip_noise("s = \"a\\\"b()\";") == "s =         ;");
}

TEST_CASE("strip_noise keeps line structure") {
  const std::string src = "int a; /* one\ntwo */ int b;\n#if X\nint c;\n#endif\n";
  const std::string out = strip_noise(src);
  CHECK(out.size() == src.size());
  CHECK(std::count(out.begin(), out.end(), '\n') == std::count(src.begin(), src.end(), '\n'));
  CHECK(out.find("int b;") != std::string::npos);
  CHECK(out.find("int c;") != std::string::npos);
  CHECK(out.find("#if") == std::string::npos);
}

TEST_CASE("strip_noise blanks continued directives") {
  const std::string out = strip_noise("#define F(x) \\\n  g(x)\nint y;");
  CHECK(out.find("g(") == std::string::npos);
  CHECK(out.find("int y;") != std::string::npos);
}

TEST_CASE("unterminated comment is a lexer error with position") {
  try {
    strip_noise("int a;\n  /* open");
    FAIL("expected LexError");
  } catch (const LexError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("find_definitions") {
  const std::string src = strip_noise("int f(int x) { return x; }");
  const auto defs = find_definitions(src);
  REQUIRE(defs.size() == 1);
  CHECK(defs[0].name == "f");
  CHECK(src.substr(defs[0].body_begin, defs[0].body_end - defs[0].body_begin) ==
        "{ return x; }");

  CHECK(find_definitions("if (x) { }").empty());
  CHECK(find_definitions("struct s v = { 1 };").empty());
  CHECK(find_definitions("int g(void);").empty());
  CHECK(find_definitions("while (1) { } for (;;) { } switch (x) { }").empty());
}

TEST_CASE("find_definitions accepts K&R parameter declarations") {
  const auto defs = find_definitions("int f(a, b)\nint a;\nchar *b;\n{ return a; }");
  CHECK(names(defs) == std::vector<std::string>{"f"});
}

TEST_CASE("find_definitions skips aggregate bodies and prototypes") {
  const auto defs = find_definitions(
      "struct ops { int (*fn)(int); };\n"
      "static const struct ops table = { 0 };\n"
      "int h(void);\n"
      "static int k(void) { return 0; }\n");
  CHECK(names(defs) == std::vector<std::string>{"k"});
}

TEST_CASE("find_definitions rejects unbalanced input") {
  CHECK_THROWS_AS(find_definitions("int f(void) { if (x) { }"), DataError);
  CHECK_THROWS_AS(find_definitions("int f(void) { } }"), DataError);
}

TEST_CASE("find_calls") {
  CHECK(find_calls("{ a(); b (1); a(); }") == std::vector<std::string>{"a", "b"});
  CHECK(find_calls("{ if (x) return (y); while (z) {} sizeof(int); }").empty());
  CHECK(find_calls("{ s.fn(1); p->fn(2); g(); }") == std::vector<std::string>{"g"});
}

TEST_CASE("extraction examples") {
  {
    const auto net = extract_one("void a(void){b();} void b(void){}");
    CHECK(net.graph.size() == 2);
    CHECK(labeled_edges(net.graph) == std::set<std::pair<std::string, std::string>>{{"a", "b"}});
  }
  {
    const auto net = extract_one("void f(void){f();}");
    CHECK(net.graph.size() == 1);
    CHECK(net.graph.has_edge(0, 0));
  }
  {
    const auto net = extract_one("void f(void){printf(\"x\"); puts(\"y\"); printf(\"z\");}");
    CHECK(net.graph.edge_count() == 0);
    CHECK(net.report.unresolved_call_names == 2);
  }
}

TEST_CASE("caller out-degree equals distinct defined callees") {
  const auto net = extract_one(
      "void x(void){} void y(void){}\n"
      "void c(void){ x(); x(); y(); x(); y(); z(); }");
  const auto& g = net.graph;
  // Nodes are sorted by name: c, x, y.
  CHECK(g.label(0) == "c");
  CHECK(g.out_degree(0) == 2);
  CHECK(net.report.n_calls == 2);
  CHECK(net.report.n_procedures == g.size());
}

TEST_CASE("node order is lexicographic") {
  const auto net = extract_one("void zeta(void){} void alpha(void){zeta();} void mid(void){}");
  CHECK(net.graph.labels() == std::vector<std::string>{"alpha", "mid", "zeta"});
}

TEST_CASE("empty input raises an empty-graph error") {
  CHECK_THROWS_AS(extract_one("int x; /* no functions */"), EmptyGraphError);
}

TEST_CASE("unbalanced file is skipped and extraction continues") {
  const auto net = extract_pcn_sources({{"bad.c", "void broken(void) { {"},
                                        {"good.c", "void ok(void) { ok(); }"}});
  CHECK(net.graph.size() == 1);
  REQUIRE(net.report.skipped_files.size() == 1);
  CHECK(net.report.skipped_files[0].path == "bad.c");
}

TEST_CASE("fixture corpus reproduces the expected call graph") {
  const fs::path root = fs::path(NETSPECTRA_FIXTURES) / "corpus";
  const auto net = extract_pcn(root);
  std::set<std::pair<std::string, std::string>> expected;
  std::ifstream in(fs::path(NETSPECTRA_FIXTURES) / "corpus.expected");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto space = line.find(' ');
    expected.insert({line.substr(0, space), line.substr(space + 1)});
  }
  CHECK(labeled_edges(net.graph) == expected);
  CHECK(net.report.n_files_scanned == 12);
  CHECK(net.report.n_procedures == 18);
  CHECK(net.report.skipped_files.empty());
  // printf and the ALLOC macro are called but never defined.
  CHECK(net.report.unresolved_call_names == 2);
}

TEST_CASE("extraction is deterministic") {
  const fs::path root = fs::path(NETSPECTRA_FIXTURES) / "corpus";
  const auto a = extract_pcn(root);
  ExtractOptions serial;
  serial.threads = 1;
  const auto b = extract_pcn(root, serial);
  CHECK(a.graph == b.graph);
}

TEST_CASE("extension filter and directory walk") {
  TempDir dir("cg");
  {
    std::ofstream(dir.path / "a.c") << "void a(void){ b(); }";
    std::ofstream(dir.path / "b.txt") << "void b(void){}";
  }
  auto net = extract_pcn(dir.path);
  CHECK(net.graph.size() == 1);
  CHECK(net.report.n_files_scanned == 1);

  ExtractOptions all;
  all.extensions = {".c", ".txt"};
  net = extract_pcn(dir.path, all);
  CHECK(net.graph.size() == 2);
  CHECK(net.graph.edge_count() == 1);
}
