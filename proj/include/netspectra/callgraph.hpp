#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netspectra/graph.hpp"

namespace netspectra {

// Procedure-call network extraction from C sources.
//
// This is a heuristic lexer, not a C parser. Function-like macros are not
// expanded, so calls made through macros are missed; calls through function
// pointers (including `obj->fn(...)` and `obj.fn(...)`) are not resolved.
// Every branch of `#if`/`#ifdef` blocks is scanned.

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct ExtractionReport {
  std::size_t n_procedures = 0;
  std::size_t n_calls = 0;
  std::size_t n_files_scanned = 0;
  std::vector<SkippedFile> skipped_files;
  /// Distinct callee names invoked somewhere but defined nowhere in the tree.
  std::size_t unresolved_call_names = 0;
};

struct ExtractOptions {
  std::vector<std::string> extensions{".c", ".h"};
  std::size_t threads = 0;  ///< 0 selects thread_count()
};

/// A function definition found in noise-stripped source. The body span
/// covers the braces: `source.substr(body_begin, body_end - body_begin)`
/// starts with '{' and ends with '}'.
struct FunctionDefinition {
  std::string name;
  std::size_t body_begin = 0;
  std::size_t body_end = 0;
};

/// Replaces comments and string/char literals by spaces of equal length and
/// blanks preprocessor directive lines (with continuations). Newlines are
/// kept so line/column positions are preserved. Throws LexError on an
/// unterminated block comment.
std::string strip_noise(std::string_view source);

/// Finds `name(...) {` definitions at brace depth 0 of stripped source.
/// Throws DataError on unbalanced braces or parentheses.
std::vector<FunctionDefinition> find_definitions(std::string_view stripped);

/// Names invoked as `name(` inside `body`, excluding keywords and member
/// calls. Distinct, in first-seen order.
std::vector<std::string> find_calls(std::string_view body);

struct ExtractedNetwork {
  DirectedGraph graph;
  ExtractionReport report;
};

/// Walks `root` recursively. Nodes are the uniquely named definitions in
/// lexicographic order; edges go caller -> callee for callees defined in the
/// tree. Throws EmptyGraphError when no function is found.
ExtractedNetwork extract_pcn(const std::filesystem::path& root,
                             const ExtractOptions& options = {});

/// Same extraction over in-memory (path, contents) pairs.
ExtractedNetwork extract_pcn_sources(
    const std::vector<std::pair<std::string, std::string>>& sources);

}  // namespace netspectra
