#include "hgde/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "hgde/errors.hpp"

namespace hgde {

Graph::Graph(std::size_t num_nodes,
             std::span<const std::pair<std::size_t, std::size_t>> edges)
    : adjacency_(num_nodes) {
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a >= num_nodes || b >= num_nodes) {
      throw InputError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") references a node outside [0, " + std::to_string(num_nodes) +
                       ")");
    }
    if (a == b) {
      throw InputError("self-loop on node " + std::to_string(a));
    }
    edges_.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const Edge& e : edges_) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  return neighbor_index(i, j) != npos;
}

std::size_t Graph::neighbor_index(std::size_t i, std::size_t j) const {
  const auto& list = adjacency_.at(i);
  const auto it = std::lower_bound(list.begin(), list.end(), j);
  if (it == list.end() || *it != j) return npos;
  return static_cast<std::size_t>(it - list.begin());
}

std::vector<int> Graph::hop_distances(std::size_t source, int max_depth) const {
  std::vector<int> dist(num_nodes(), max_depth + 1);
  dist.at(source) = 0;
  std::deque<std::size_t> frontier{source};
  while (!frontier.empty()) {
    const std::size_t x = frontier.front();
    frontier.pop_front();
    if (dist[x] >= max_depth) continue;
    for (std::size_t y : adjacency_[x]) {
      if (dist[y] > dist[x] + 1) {
        dist[y] = dist[x] + 1;
        frontier.push_back(y);
      }
    }
  }
  return dist;
}

}  // namespace hgde
