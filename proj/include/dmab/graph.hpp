// Copyright 2026 The dmab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "dmab/matrix.hpp"
#include "dmab/rng.hpp"

namespace dmab {

using NodeSet = std::vector<std::size_t>;
using Edge = std::pair<std::size_t, std::size_t>;

// Undirected communication graph on nodes 0..M-1. Every node is adjacent to
// itself, so a client always belongs to its own neighborhood. Immutable.
class Graph {
 public:
  // Builds from a full M x M adjacency table; throws unless it is symmetric
  // with an all-true diagonal.
  explicit Graph(Matrix<unsigned char> adjacency);

  // Graph on M nodes with the given undirected edges (0-based, any order).
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const { return adjacency_.rows(); }
  bool adjacent(std::size_t i, std::size_t j) const {
    return adjacency_(i, j) != 0;
  }
  // Neighbors other than the node itself, ascending.
  std::span<const std::size_t> neighbors(std::size_t i) const {
    return neighbors_[i];
  }
  std::size_t degree(std::size_t i) const { return neighbors_[i].size(); }
  // Off-diagonal edge count.
  std::size_t edge_count() const;
  // Edges as (i, j) with i < j, lexicographically sorted.
  std::vector<Edge> edges() const;

  const Matrix<unsigned char>& adjacency() const { return adjacency_; }

  bool operator==(const Graph& other) const {
    return adjacency_ == other.adjacency_;
  }

 private:
  Matrix<unsigned char> adjacency_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

// Doubly stochastic, symmetric mixing matrix supported on a graph.
class WeightMatrix {
 public:
  explicit WeightMatrix(Matrix<double> entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(i, j);
  }
  std::span<const double> row(std::size_t i) const { return entries_.row(i); }
  const Matrix<double>& entries() const { return entries_; }

  double max_row_sum_deviation() const;
  double max_col_sum_deviation() const;

 private:
  Matrix<double> entries_;
};

Graph make_complete_graph(std::size_t m);
Graph make_empty_graph(std::size_t m);
Graph make_path_graph(std::size_t m);
// Nodes [0, q) form a clique component, nodes [q, m) a second complete
// component. Requires 1 <= q < m.
Graph make_disconnected_clique_graph(std::size_t m, std::size_t q);

struct TwoExpanderGraph {
  Graph graph;
  NodeSet i0;
  NodeSet i1;
};

// Dumbbell: cliques on the first and last m/4 nodes joined by a path through
// the middle m/2 nodes. Requires m % 4 == 0 and 0 < eta <= 4.
TwoExpanderGraph make_two_expander_graph(std::size_t m, double eta);

// Erdos-Renyi: each off-diagonal pair independently with probability c.
Graph sample_er_graph(std::size_t m, double c, Rng& rng);

// Uniform spanning tree (Aldous-Broder walk on K_m) plus each non-tree pair
// independently with probability c. Always connected.
Graph sample_random_connected_graph(std::size_t m, double c, Rng& rng);

bool is_connected(const Graph& g);

// Minimum hop distance between two node sets; nullopt when unreachable.
std::optional<std::size_t> set_distance(const Graph& g, std::span<const std::size_t> a,
                                        std::span<const std::size_t> b);

// W_ij = 1 / (1 + max(deg_i, deg_j)) on edges, diagonal takes the remainder.
WeightMatrix metropolis_weights(const Graph& g);

// Edge-list text: first line M, then "i j" per edge, 1-based with i < j.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

// Rule producing G_t for every step t = 1, 2, ...
class TemporalGraphModel {
 public:
  struct Static {
    Graph graph;
  };
  struct ErdosRenyi {
    std::size_t node_count;
    double c;
  };
  struct RandomConnected {
    std::size_t node_count;
    double c;
  };
  // Cycles through `graphs`; the union of every `window` consecutive graphs
  // (cyclically) must be connected.
  struct PeriodicUnionConnected {
    std::size_t window;
    std::vector<Graph> graphs;
  };
  using Kind = std::variant<Static, ErdosRenyi, RandomConnected, PeriodicUnionConnected>;

  static TemporalGraphModel make_static(Graph g);
  static TemporalGraphModel erdos_renyi(std::size_t m, double c);
  static TemporalGraphModel random_connected(std::size_t m, double c);
  static TemporalGraphModel periodic_union(std::size_t window, std::vector<Graph> graphs);

  std::size_t node_count() const;
  bool is_static() const { return std::holds_alternative<Static>(kind_); }
  const Kind& kind() const { return kind_; }

  // G_t for 1-based step t. Sampling kinds draw from rng; the others ignore it.
  Graph graph_at(std::size_t t, Rng& rng) const;

 private:
  explicit TemporalGraphModel(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

}  // namespace dmab
