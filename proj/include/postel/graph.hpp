#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "postel/errors.hpp"

namespace postel {

using NodeId = std::uint32_t;
using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

// Immutable undirected graph in CSR form. Every undirected edge {u,v} is
// stored as both (u,v) and (v,u); rows are sorted, deduplicated, and free of
// self loops. Safe to share read-only across threads.
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> row_offsets;  // num_nodes + 1
  std::vector<NodeId> col_indices;       // 2 * num_undirected_edges
  std::size_t num_undirected_edges = 0;

  std::span<const NodeId> neighbors(NodeId i) const {
    return {col_indices.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
  }

  std::size_t degree(NodeId i) const { return row_offsets[i + 1] - row_offsets[i]; }
};

// Builds the CSR graph from an edge list. Edges may be listed once or twice
// per undirected pair; duplicates and self loops are dropped.
inline Graph build_graph(std::size_t num_nodes, const EdgeList& edges) {
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes) throw InvalidNode(u);
    if (v >= num_nodes) throw InvalidNode(v);
  }

  std::vector<std::size_t> offsets(num_nodes + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    ++offsets[u + 1];
    ++offsets[v + 1];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) offsets[i + 1] += offsets[i];

  std::vector<NodeId> scratch(offsets[num_nodes]);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    scratch[cursor[u]++] = v;
    scratch[cursor[v]++] = u;
  }

  Graph g;
  g.num_nodes = num_nodes;
  g.row_offsets.assign(num_nodes + 1, 0);
  g.col_indices.reserve(scratch.size());
  for (std::size_t i = 0; i < num_nodes; ++i) {
    auto first = scratch.begin() + static_cast<std::ptrdiff_t>(offsets[i]);
    auto last = scratch.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]);
    std::sort(first, last);
    auto end = std::unique(first, last);
    g.col_indices.insert(g.col_indices.end(), first, end);
    g.row_offsets[i + 1] = g.col_indices.size();
  }
  g.num_undirected_edges = g.col_indices.size() / 2;
  return g;
}

// All directed pairs (u,v) in E with both endpoints within `hops` BFS steps
// of node i. With hops >= diameter this is the full directed edge set of i's
// component.
inline EdgeList ego_edges(const Graph& g, NodeId i, int hops) {
  std::vector<int> dist(g.num_nodes, -1);
  std::vector<NodeId> frontier{i};
  std::vector<NodeId> reached{i};
  dist[i] = 0;
  for (int h = 0; h < hops && !frontier.empty(); ++h) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId v : g.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = h + 1;
          next.push_back(v);
          reached.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }

  EdgeList out;
  for (NodeId u : reached)
    for (NodeId v : g.neighbors(u))
      if (dist[v] >= 0) out.emplace_back(u, v);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace postel
