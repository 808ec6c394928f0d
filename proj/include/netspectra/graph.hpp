#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace netspectra {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src;
  NodeId dst;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed graph in compressed (CSR) out-adjacency form.
///
/// The adjacency matrix is 0/1: duplicate (src, dst) pairs collapse on
/// construction. Self-loops are kept. Each node's out-list is sorted.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Builds a graph with `n_nodes` nodes. Throws ParameterError if an edge
  /// endpoint is out of range or `labels` is non-empty with the wrong size.
  DirectedGraph(std::size_t n_nodes, std::vector<Edge> edges,
                std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return size() == 0; }

  std::span<const NodeId> out(NodeId node) const {
    return {targets_.data() + offsets_[node], targets_.data() + offsets_[node + 1]};
  }
  std::size_t out_degree(NodeId node) const { return offsets_[node + 1] - offsets_[node]; }
  bool has_edge(NodeId src, NodeId dst) const;

  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// Label of `node`, or its decimal index when the graph is unlabeled.
  std::string label(NodeId node) const;

  /// All edges in (src, dst) lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const DirectedGraph&, const DirectedGraph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<std::string> labels_;
};

/// Insertion-ordered bijection between distinct labels and [0, size()).
class NodeMap {
 public:
  NodeId intern(std::string_view label);
  std::optional<NodeId> find(std::string_view label) const;
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::vector<std::string> release() && { return std::move(labels_); }

 private:
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::string> labels_;
};

// Edge-list text format: one `src dst` pair per line; blank lines and lines
// starting with '#' are ignored. Tokens are either all non-negative integers
// or all string labels. The writer emits a `# nodes <N>` comment which the
// reader honors so that trailing isolated nodes survive a round trip.

DirectedGraph load_edge_list(std::istream& in);
DirectedGraph load_edge_list_file(const std::string& path);

/// Attaches labels from `index<TAB>label` lines. The node count grows to
/// cover every labeled index.
DirectedGraph attach_labels(const DirectedGraph& g, std::istream& labels);
DirectedGraph attach_labels_file(const DirectedGraph& g, const std::string& path);

/// Writes integer-indexed edges (labels go to a separate label file).
void write_edge_list(std::ostream& out, const DirectedGraph& g);
void write_labels(std::ostream& out, const DirectedGraph& g);

/// Reverses every link: (i, j) is present iff (j, i) was.
DirectedGraph invert_links(const DirectedGraph& g);

/// Symmetric closure of the edge set.
DirectedGraph to_undirected(const DirectedGraph& g);

// Synthetic fixtures.
DirectedGraph generate_chain(std::size_t n);
DirectedGraph generate_cycle(std::size_t n);
/// Node (x, y) has index y*w + x and links right and down.
DirectedGraph generate_grid(std::size_t w, std::size_t h);

/// Directed preferential attachment. Nodes 0..m start present; every node
/// i >= 1 emits exactly m links to distinct present nodes other than itself,
/// chosen with probability proportional to (in-degree + 1). Total edges are
/// m * (n - 1). Deterministic for a given seed.
DirectedGraph generate_preferential(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace netspectra
