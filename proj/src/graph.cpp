#include "netspectra/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "netspectra/error.hpp"

namespace netspectra {

DirectedGraph::DirectedGraph(std::size_t n_nodes, std::vector<Edge> edges,
                             std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (n_nodes > std::numeric_limits<NodeId>::max()) {
    throw ParameterError("graph too large for 32-bit node ids");
  }
  if (!labels_.empty() && labels_.size() != n_nodes) {
    throw ParameterError("label count " + std::to_string(labels_.size()) +
                         " does not match node count " + std::to_string(n_nodes));
  }
  for (const Edge& e : edges) {
    if (e.src >= n_nodes || e.dst >= n_nodes) {
      throw ParameterError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                           ") out of range for " + std::to_string(n_nodes) + " nodes");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  offsets_.assign(n_nodes + 1, 0);
  for (const Edge& e : edges) ++offsets_[e.src + 1];
  for (std::size_t i = 0; i < n_nodes; ++i) offsets_[i + 1] += offsets_[i];
  targets_.reserve(edges.size());
  for (const Edge& e : edges) targets_.push_back(e.dst);
}

bool DirectedGraph::has_edge(NodeId src, NodeId dst) const {
  auto row = out(src);
  return std::binary_search(row.begin(), row.end(), dst);
}

std::string DirectedGraph::label(NodeId node) const {
  return labels_.empty() ? std::to_string(node) : labels_[node];
}

std::vector<Edge> DirectedGraph::edges() const {
  std::vector<Edge> result;
  result.reserve(edge_count());
  for (NodeId i = 0; i < size(); ++i) {
    for (NodeId j : out(i)) result.push_back({i, j});
  }
  return result;
}

NodeId NodeMap::intern(std::string_view label) {
  auto key = std::string(label);
  auto [it, inserted] = index_.try_emplace(key, static_cast<NodeId>(labels_.size()));
  if (inserted) labels_.push_back(std::move(key));
  return it->second;
}

std::optional<NodeId> NodeMap::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool is_index_token(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
}

NodeId parse_index(std::string_view tok, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() ||
      value >= std::numeric_limits<NodeId>::max()) {
    throw ParseError("node index out of range: " + std::string(tok), line);
  }
  return static_cast<NodeId>(value);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Recognizes the writer's "# nodes <N>" header.
std::optional<std::size_t> node_count_hint(std::string_view comment) {
  comment.remove_prefix(1);
  comment = trim(comment);
  constexpr std::string_view key = "nodes";
  if (!comment.starts_with(key)) return std::nullopt;
  comment = trim(comment.substr(key.size()));
  if (comment.starts_with(':')) comment = trim(comment.substr(1));
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(comment.data(), comment.data() + comment.size(), value);
  if (ec != std::errc() || ptr != comment.data() + comment.size()) return std::nullopt;
  return value;
}

enum class TokenStyle { unknown, index, label };

}  // namespace

DirectedGraph load_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  NodeMap names;
  TokenStyle style = TokenStyle::unknown;
  std::size_t declared_nodes = 0;
  std::size_t max_index_plus_one = 0;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto hint = node_count_hint(line)) declared_nodes = std::max(declared_nodes, *hint);
      continue;
    }
    std::istringstream fields{std::string(line)};
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ParseError("expected two whitespace-separated tokens", line_no);
    }
    const bool a_idx = is_index_token(a);
    const bool b_idx = is_index_token(b);
    if (a_idx != b_idx) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": mixed integer and label tokens");
    }
    const TokenStyle this_style = a_idx ? TokenStyle::index : TokenStyle::label;
    if (style == TokenStyle::unknown) {
      style = this_style;
    } else if (style != this_style) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": mixed integer and label token styles in one file");
    }
    if (style == TokenStyle::index) {
      const NodeId s = parse_index(a, line_no);
      const NodeId d = parse_index(b, line_no);
      max_index_plus_one = std::max<std::size_t>({max_index_plus_one, s + 1u, d + 1u});
      edges.push_back({s, d});
    } else {
      const NodeId s = names.intern(a);
      const NodeId d = names.intern(b);
      edges.push_back({s, d});
    }
  }
  if (in.bad()) throw Error("read failure while loading edge list");

  if (style == TokenStyle::label) {
    const std::size_t n = names.size();
    return DirectedGraph(n, std::move(edges), std::move(names).release());
  }
  return DirectedGraph(std::max(declared_nodes, max_index_plus_one), std::move(edges));
}

DirectedGraph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list: " + path);
  return load_edge_list(in);
}

DirectedGraph attach_labels(const DirectedGraph& g, std::istream& in) {
  std::vector<std::pair<NodeId, std::string>> entries;
  std::size_t n = g.size();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty() || trim(raw).front() == '#') continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos) throw ParseError("expected index<TAB>label", line_no);
    const auto idx_tok = trim(std::string_view(raw).substr(0, tab));
    if (!is_index_token(idx_tok)) throw ParseError("label index is not an integer", line_no);
    const NodeId idx = parse_index(idx_tok, line_no);
    entries.emplace_back(idx, raw.substr(tab + 1));
    n = std::max<std::size_t>(n, idx + 1u);
  }
  std::vector<std::string> labels(n);
  for (NodeId i = 0; i < n; ++i) labels[i] = std::to_string(i);
  for (auto& [idx, name] : entries) labels[idx] = std::move(name);
  return DirectedGraph(n, g.edges(), std::move(labels));
}

DirectedGraph attach_labels_file(const DirectedGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file: " + path);
  return attach_labels(g, in);
}

void write_edge_list(std::ostream& out, const DirectedGraph& g) {
  out << "# nodes " << g.size() << '\n';
  for (const Edge& e : g.edges()) out << e.src << ' ' << e.dst << '\n';
}

void write_labels(std::ostream& out, const DirectedGraph& g) {
  for (NodeId i = 0; i < g.size(); ++i) out << i << '\t' << g.label(i) << '\n';
}

DirectedGraph invert_links(const DirectedGraph& g) {
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) std::swap(e.src, e.dst);
  return DirectedGraph(g.size(), std::move(edges), g.labels());
}

DirectedGraph to_undirected(const DirectedGraph& g) {
  std::vector<Edge> edges = g.edges();
  const std::size_t m = edges.size();
  edges.reserve(2 * m);
  for (std::size_t k = 0; k < m; ++k) edges.push_back({edges[k].dst, edges[k].src});
  return DirectedGraph(g.size(), std::move(edges), g.labels());
}

DirectedGraph generate_chain(std::size_t n) {
  if (n < 1) throw ParameterError("chain needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
  }
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph generate_cycle(std::size_t n) {
  if (n < 1) throw ParameterError("cycle needs n >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)});
  }
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph generate_grid(std::size_t w, std::size_t h) {
  if (w < 1 || h < 1) throw ParameterError("grid needs w, h >= 1");
  std::vector<Edge> edges;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto node = static_cast<NodeId>(y * w + x);
      if (x + 1 < w) edges.push_back({node, static_cast<NodeId>(node + 1)});
      if (y + 1 < h) edges.push_back({node, static_cast<NodeId>(node + w)});
    }
  }
  return DirectedGraph(w * h, std::move(edges));
}

namespace {

// Unbiased draw in [0, bound) that does not depend on the standard library's
// distribution implementations, so sequences are stable across toolchains.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

DirectedGraph generate_preferential(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || n <= m) throw ParameterError("preferential attachment needs n > m >= 1");
  std::mt19937_64 rng(seed);

  // Each present node appears once, plus once per in-link received, so a
  // uniform draw from `urn` is proportional to (in-degree + 1).
  std::vector<NodeId> urn;
  urn.reserve(n + m * n);
  for (std::size_t i = 0; i <= m; ++i) urn.push_back(static_cast<NodeId>(i));

  std::vector<Edge> edges;
  edges.reserve(m * (n - 1));
  std::vector<NodeId> chosen;
  for (std::size_t i = 1; i < n; ++i) {
    const auto src = static_cast<NodeId>(i);
    chosen.clear();
    if (i <= m) {
      for (std::size_t j = 0; j <= m; ++j) {
        if (j != i) chosen.push_back(static_cast<NodeId>(j));
      }
    } else {
      // Node i is not yet in the urn, so draws are always other nodes.
      while (chosen.size() < m) {
        const NodeId t = urn[bounded(rng, urn.size())];
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
      }
    }
    for (NodeId t : chosen) {
      edges.push_back({src, t});
      urn.push_back(t);
    }
    if (i > m) urn.push_back(src);
  }
  return DirectedGraph(n, std::move(edges));
}

}  // namespace netspectra
