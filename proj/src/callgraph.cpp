#include "netspectra/callgraph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "netspectra/error.hpp"
#include "netspectra/parallel.hpp"

namespace netspectra {

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Words that may precede '(' without naming a function.
const std::unordered_set<std::string_view>& non_callable_words() {
  static const std::unordered_set<std::string_view> words = {
      "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
      "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
      "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch",
      "typedef", "union", "unsigned", "void", "volatile", "while", "_Bool", "_Complex",
      "_Alignas", "_Alignof", "_Atomic", "_Generic", "_Noreturn", "_Static_assert",
      "_Thread_local", "__attribute__", "__attribute", "typeof", "__typeof__", "__typeof",
      "asm", "__asm__", "__asm", "__volatile__", "__volatile", "__extension__", "__inline",
      "__inline__", "__const", "__const__", "__restrict", "__restrict__", "__signed__",
      "defined", "alignof", "__alignof__"};
  return words;
}

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

// Index one past the delimiter matching s[open]; npos if unbalanced.
std::size_t match_group(std::string_view s, std::size_t open, char lhs, char rhs) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == lhs) {
      ++depth;
    } else if (s[i] == rhs) {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// Accepts old-style parameter declarations between ')' and '{', e.g.
// `int f(a) int a; {`. Returns the position of '{' or npos.
std::size_t skip_kr_declarations(std::string_view s, std::size_t i) {
  if (i >= s.size() || !is_ident_start(s[i])) return std::string_view::npos;
  char last = '\0';
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '{') return last == ';' ? i : std::string_view::npos;
    const bool allowed = is_ident_char(c) || is_space(c) || c == ';' || c == '*' || c == ',' ||
                         c == '[' || c == ']';
    if (!allowed) return std::string_view::npos;
    if (!is_space(c)) last = c;
  }
  return std::string_view::npos;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("read failure");
  return std::move(buffer).str();
}

struct FileScan {
  std::vector<std::pair<std::string, std::vector<std::string>>> definitions;
  std::string error;
};

FileScan scan_source(std::string_view source) {
  FileScan scan;
  try {
    const std::string stripped = strip_noise(source);
    for (auto& def : find_definitions(stripped)) {
      const auto body = std::string_view(stripped).substr(def.body_begin,
                                                          def.body_end - def.body_begin);
      scan.definitions.emplace_back(std::move(def.name), find_calls(body));
    }
  } catch (const Error& e) {
    scan.definitions.clear();
    scan.error = e.what();
  }
  return scan;
}

ExtractedNetwork merge_scans(const std::vector<std::string>& paths,
                             const std::vector<FileScan>& scans) {
  ExtractionReport report;
  report.n_files_scanned = paths.size();
  std::map<std::string, std::set<std::string>> callees_of;
  for (std::size_t f = 0; f < scans.size(); ++f) {
    if (!scans[f].error.empty()) {
      report.skipped_files.push_back({paths[f], scans[f].error});
      continue;
    }
    for (const auto& [name, calls] : scans[f].definitions) {
      auto& callees = callees_of[name];
      callees.insert(calls.begin(), calls.end());
    }
  }
  if (callees_of.empty()) throw EmptyGraphError("no functions found");

  std::vector<std::string> names;
  names.reserve(callees_of.size());
  std::map<std::string_view, NodeId> index;
  for (const auto& entry : callees_of) {
    index.emplace(entry.first, static_cast<NodeId>(names.size()));
    names.push_back(entry.first);
  }
  std::vector<Edge> edges;
  std::set<std::string_view> unresolved;
  for (const auto& [caller, callees] : callees_of) {
    const NodeId src = index.at(caller);
    for (const auto& callee : callees) {
      if (auto it = index.find(callee); it != index.end()) {
        edges.push_back({src, it->second});
      } else {
        unresolved.insert(callee);
      }
    }
  }
  report.n_procedures = names.size();
  report.n_calls = edges.size();
  report.unresolved_call_names = unresolved.size();
  const std::size_t n = names.size();
  return {DirectedGraph(n, std::move(edges), std::move(names)), std::move(report)};
}

}  // namespace

std::string strip_noise(std::string_view src) {
  enum class State { code, line_comment, block_comment, string_lit, char_lit };
  std::string out(src.size(), ' ');
  State state = State::code;
  bool directive = false;
  bool line_blank_so_far = true;
  std::size_t line = 1, col = 1;
  std::size_t comment_line = 0, comment_col = 0;

  // True when the newline at position i is escaped by a backslash.
  auto continued = [&](std::size_t i) {
    std::size_t k = i;
    if (k > 0 && src[k - 1] == '\r') --k;
    return k > 0 && src[k - 1] == '\\';
  };

  for (std::size_t i = 0; i < src.size(); ++i) {
    const char c = src[i];
    const char next = i + 1 < src.size() ? src[i + 1] : '\0';
    if (c == '\n') {
      out[i] = '\n';
      const bool escaped = continued(i);
      if (state == State::line_comment && !escaped) state = State::code;
      if ((state == State::string_lit || state == State::char_lit) && !escaped) state = State::code;
      if (directive && !escaped && state == State::code) directive = false;
      if (!escaped) line_blank_so_far = true;
      ++line;
      col = 1;
      continue;
    }
    switch (state) {
      case State::code:
        if (c == '/' && next == '/') {
          state = State::line_comment;
          ++i;
          ++col;
        } else if (c == '/' && next == '*') {
          state = State::block_comment;
          comment_line = line;
          comment_col = col;
          ++i;
          ++col;
        } else if (c == '"') {
          state = State::string_lit;
          line_blank_so_far = false;
        } else if (c == '\'') {
          state = State::char_lit;
          line_blank_so_far = false;
        } else if (c == '#' && line_blank_so_far && !directive) {
          directive = true;
          line_blank_so_far = false;
        } else {
          if (!is_space(c)) line_blank_so_far = false;
          if (!directive) out[i] = c;
        }
        break;
      case State::line_comment:
        break;
      case State::block_comment:
        if (c == '*' && next == '/') {
          state = State::code;
          ++i;
          ++col;
        }
        break;
      case State::string_lit:
      case State::char_lit:
        if (c == '\\' && next != '\0' && next != '\n') {
          ++i;
          ++col;
        } else if ((state == State::string_lit && c == '"') ||
                   (state == State::char_lit && c == '\'')) {
          state = State::code;
        }
        break;
    }
    ++col;
  }
  if (state == State::block_comment) {
    throw LexError("unterminated comment", comment_line, comment_col);
  }
  return out;
}

std::vector<FunctionDefinition> find_definitions(std::string_view s) {
  constexpr auto npos = std::string_view::npos;
  const auto& excluded = non_callable_words();
  std::vector<FunctionDefinition> defs;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (is_ident_start(c)) {
      const std::size_t begin = i;
      while (i < s.size() && is_ident_char(s[i])) ++i;
      const std::string_view name = s.substr(begin, i - begin);
      std::size_t j = skip_space(s, i);
      if (j >= s.size() || s[j] != '(') continue;
      const std::size_t params_end = match_group(s, j, '(', ')');
      if (params_end == npos) throw DataError("unbalanced parentheses");
      std::size_t k = skip_space(s, params_end);
      if (k < s.size() && s[k] != '{') {
        if (const auto kr = skip_kr_declarations(s, k); kr != npos) k = kr;
      }
      if (k < s.size() && s[k] == '{') {
        const std::size_t body_end = match_group(s, k, '{', '}');
        if (body_end == npos) throw DataError("unbalanced braces");
        if (!excluded.contains(name)) defs.push_back({std::string(name), k, body_end});
        i = body_end;
      } else {
        i = params_end;
      }
    } else if (c >= '0' && c <= '9') {
      while (i < s.size() && (is_ident_char(s[i]) || s[i] == '.')) ++i;
    } else if (c == '{') {
      const std::size_t end = match_group(s, i, '{', '}');
      if (end == npos) throw DataError("unbalanced braces");
      i = end;
    } else if (c == '}') {
      throw DataError("unbalanced braces");
    } else if (c == '(') {
      const std::size_t end = match_group(s, i, '(', ')');
      if (end == npos) throw DataError("unbalanced parentheses");
      i = end;
    } else {
      ++i;
    }
  }
  return defs;
}

std::vector<std::string> find_calls(std::string_view body) {
  const auto& excluded = non_callable_words();
  std::vector<std::string> calls;
  std::unordered_set<std::string_view> seen;
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (is_ident_start(c)) {
      const std::size_t begin = i;
      while (i < body.size() && is_ident_char(body[i])) ++i;
      const std::string_view name = body.substr(begin, i - begin);
      const std::size_t j = skip_space(body, i);
      if (j >= body.size() || body[j] != '(' || excluded.contains(name)) continue;
      std::size_t p = begin;
      while (p > 0 && is_space(body[p - 1])) --p;
      const bool member = p > 0 && (body[p - 1] == '.' || (p > 1 && body[p - 1] == '>' && body[p - 2] == '-'));
      if (!member && seen.insert(name).second) calls.emplace_back(name);
    } else if (c >= '0' && c <= '9') {
      while (i < body.size() && (is_ident_char(body[i]) || body[i] == '.')) ++i;
    } else {
      ++i;
    }
  }
  return calls;
}

ExtractedNetwork extract_pcn(const std::filesystem::path& root, const ExtractOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(root, ec)) throw ParameterError("source root does not exist: " + root.string());

  std::vector<fs::path> files;
  if (fs::is_regular_file(root, ec)) {
    files.push_back(root);
  } else {
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw Error("cannot walk " + root.string() + ": " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
      if (ec) break;
      if (!it->is_regular_file(ec)) continue;
      const auto ext = it->path().extension().string();
      if (std::find(options.extensions.begin(), options.extensions.end(), ext) !=
          options.extensions.end()) {
        files.push_back(it->path());
      }
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<std::string> names;
  names.reserve(files.size());
  for (const auto& f : files) {
    auto rel = fs::is_directory(root, ec) ? f.lexically_relative(root) : f.filename();
    names.push_back(rel.generic_string());
  }

  std::vector<FileScan> scans(files.size());
  const std::size_t workers = options.threads ? options.threads : thread_count();
  parallel_chunks(files.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      std::string text;
      try {
        text = read_file(files[f]);
      } catch (const Error& e) {
        scans[f].error = e.what();
        continue;
      }
      scans[f] = scan_source(text);
    }
  });
  return merge_scans(names, scans);
}

ExtractedNetwork extract_pcn_sources(
    const std::vector<std::pair<std::string, std::string>>& sources) {
  std::vector<std::string> names;
  std::vector<FileScan> scans;
  for (const auto& [path, text] : sources) {
    names.push_back(path);
    scans.push_back(scan_source(text));
  }
  return merge_scans(names, scans);
}

}  // namespace netspectra
