#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace hgde {

struct Edge {
  std::size_t u;
  std::size_t v;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph with sorted adjacency lists.
///
/// Edges are stored once with u < v, sorted lexicographically. Self-loops and
/// out-of-range ids are rejected; duplicates (in either orientation) collapse.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t num_nodes, std::span<const std::pair<std::size_t, std::size_t>> edges);

  std::size_t num_nodes() const { return adjacency_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const std::size_t> neighbors(std::size_t i) const { return adjacency_[i]; }
  std::size_t degree(std::size_t i) const { return adjacency_[i].size(); }
  bool has_edge(std::size_t i, std::size_t j) const;

  /// Hop distances from `source`, capped at `max_depth`; nodes farther away
  /// (or unreachable) get max_depth + 1.
  std::vector<int> hop_distances(std::size_t source, int max_depth) const;

  /// Position of j inside neighbors(i), or npos.
  std::size_t neighbor_index(std::size_t i, std::size_t j) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Edge> edges_;
};

}  // namespace hgde
