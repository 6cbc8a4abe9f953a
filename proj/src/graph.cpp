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

#include "dmab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dmab {

namespace {

Matrix<unsigned char> blank_adjacency(std::size_t m) {
  Matrix<unsigned char> adj(m, m, 0);
  for (std::size_t i = 0; i < m; ++i) adj(i, i) = 1;
  return adj;
}

void link(Matrix<unsigned char>& adj, std::size_t i, std::size_t j) {
  adj(i, j) = 1;
  adj(j, i) = 1;
}

void require_nodes(std::size_t m) {
  if (m == 0) throw std::invalid_argument("graph needs at least one node");
}

void require_probability(double c) {
  if (!(c >= 0.0 && c <= 1.0))
    throw std::invalid_argument("edge probability must lie in [0, 1]");
}

// BFS hop counts from a set of sources; unreachable nodes keep max().
std::vector<std::size_t> bfs(const Graph& g, std::span<const std::size_t> sources) {
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.node_count(), kInf);
  std::deque<std::size_t> queue;
  for (auto s : sources) {
    if (s >= g.node_count()) throw std::out_of_range("node index");
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : g.neighbors(u)) {
      if (dist[v] == kInf) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

Graph::Graph(Matrix<unsigned char> adjacency) : adjacency_(std::move(adjacency)) {
  const auto m = adjacency_.rows();
  if (adjacency_.cols() != m) throw std::invalid_argument("adjacency must be square");
  require_nodes(m);
  neighbors_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!adjacent(i, i)) throw std::invalid_argument("adjacency diagonal must be true");
    for (std::size_t j = 0; j < m; ++j) {
      if (adjacent(i, j) != adjacent(j, i))
        throw std::invalid_argument("adjacency must be symmetric");
      if (i != j && adjacent(i, j)) neighbors_[i].push_back(j);
    }
  }
}

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges) {
  require_nodes(node_count);
  auto adj = blank_adjacency(node_count);
  for (auto [i, j] : edges) {
    if (i >= node_count || j >= node_count) throw std::out_of_range("edge endpoint");
    link(adj, i, j);
  }
  return Graph(std::move(adj));
}

std::size_t Graph::edge_count() const {
  std::size_t total = 0;
  for (const auto& n : neighbors_) total += n.size();
  return total / 2;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < node_count(); ++i)
    for (auto j : neighbors_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

double WeightMatrix::max_row_sum_deviation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (auto w : row(i)) s += w;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double WeightMatrix::max_col_sum_deviation() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += entries_(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

Graph make_complete_graph(std::size_t m) {
  require_nodes(m);
  return Graph(Matrix<unsigned char>(m, m, 1));
}

Graph make_empty_graph(std::size_t m) {
  require_nodes(m);
  return Graph(blank_adjacency(m));
}

Graph make_path_graph(std::size_t m) {
  require_nodes(m);
  auto adj = blank_adjacency(m);
  for (std::size_t i = 0; i + 1 < m; ++i) link(adj, i, i + 1);
  return Graph(std::move(adj));
}

Graph make_disconnected_clique_graph(std::size_t m, std::size_t q) {
  if (q < 1 || q >= m)
    throw std::invalid_argument("disconnected clique graph needs 1 <= Q < M");
  auto adj = blank_adjacency(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if ((i < q) == (j < q)) link(adj, i, j);
  return Graph(std::move(adj));
}

TwoExpanderGraph make_two_expander_graph(std::size_t m, double eta) {
  if (m == 0 || m % 4 != 0)
    throw std::invalid_argument("two-expander graph needs M divisible by 4");
  if (!(eta > 0.0 && eta <= 4.0))
    throw std::invalid_argument("two-expander graph needs 0 < eta <= 4");
  const auto quarter = m / 4;
  auto adj = blank_adjacency(m);
  NodeSet i0;
  NodeSet i1;
  for (std::size_t i = 0; i < quarter; ++i) i0.push_back(i);
  for (std::size_t i = m - quarter; i < m; ++i) i1.push_back(i);
  for (std::size_t a = 0; a < quarter; ++a)
    for (std::size_t b = a + 1; b < quarter; ++b) {
      link(adj, i0[a], i0[b]);
      link(adj, i1[a], i1[b]);
    }
  // Path quarter-1 -> quarter -> ... -> m-quarter through the middle half.
  for (std::size_t i = quarter - 1; i + 1 <= m - quarter; ++i) link(adj, i, i + 1);
  TwoExpanderGraph out{Graph(std::move(adj)), std::move(i0), std::move(i1)};

  const auto required = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(m) / 8.0));
  const auto dist = set_distance(out.graph, out.i0, out.i1);
  if (!dist || *dist < required)
    throw std::logic_error("two-expander construction violates distance bound");
  return out;
}

Graph sample_er_graph(std::size_t m, double c, Rng& rng) {
  require_nodes(m);
  require_probability(c);
  auto adj = blank_adjacency(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (bernoulli(rng, c)) link(adj, i, j);
  return Graph(std::move(adj));
}

Graph sample_random_connected_graph(std::size_t m, double c, Rng& rng) {
  require_nodes(m);
  require_probability(c);
  auto adj = blank_adjacency(m);
  std::vector<bool> tree(m * m, false);
  std::vector<bool> visited(m, false);
  // Aldous-Broder: the first-entrance edges of a random walk on K_m form a
  // uniform spanning tree.
  std::size_t current = uniform_index(rng, m);
  visited[current] = true;
  std::size_t seen = 1;
  while (seen < m) {
    auto next = uniform_index(rng, m - 1);
    if (next >= current) ++next;
    if (!visited[next]) {
      visited[next] = true;
      ++seen;
      link(adj, current, next);
      tree[current * m + next] = tree[next * m + current] = true;
    }
    current = next;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (!tree[i * m + j] && bernoulli(rng, c)) link(adj, i, j);
  return Graph(std::move(adj));
}

bool is_connected(const Graph& g) {
  const std::size_t root = 0;
  const auto dist = bfs(g, std::span(&root, 1));
  return std::none_of(dist.begin(), dist.end(), [](std::size_t d) {
    return d == std::numeric_limits<std::size_t>::max();
  });
}

std::optional<std::size_t> set_distance(const Graph& g, std::span<const std::size_t> a,
                                        std::span<const std::size_t> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("set_distance needs nonempty sets");
  const auto dist = bfs(g, a);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (auto v : b) {
    if (v >= g.node_count()) throw std::out_of_range("node index");
    best = std::min(best, dist[v]);
  }
  if (best == std::numeric_limits<std::size_t>::max()) return std::nullopt;
  return best;
}

WeightMatrix metropolis_weights(const Graph& g) {
  const auto m = g.node_count();
  Matrix<double> w(m, m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto j : g.neighbors(i))
      w(i, j) = 1.0 / (1.0 + static_cast<double>(std::max(g.degree(i), g.degree(j))));
  }
  for (std::size_t i = 0; i < m; ++i) {
    double off = 0.0;
    for (auto j : g.neighbors(i)) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return WeightMatrix(std::move(w));
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.node_count() << '\n';
  for (auto [i, j] : g.edges()) out << (i + 1) << ' ' << (j + 1) << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::size_t m = 0;
  if (!(in >> m) || m == 0) throw std::runtime_error("edge list: bad node count");
  std::vector<Edge> edges;
  std::size_t i = 0;
  std::size_t j = 0;
  while (in >> i >> j) {
    if (i < 1 || j < 1 || i > m || j > m || i == j)
      throw std::runtime_error("edge list: bad edge " + std::to_string(i) + " " + std::to_string(j));
    edges.emplace_back(i - 1, j - 1);
  }
  if (!in.eof()) throw std::runtime_error("edge list: trailing garbage");
  return Graph::from_edges(m, edges);
}

TemporalGraphModel TemporalGraphModel::make_static(Graph g) {
  return TemporalGraphModel(Static{std::move(g)});
}

TemporalGraphModel TemporalGraphModel::erdos_renyi(std::size_t m, double c) {
  require_nodes(m);
  require_probability(c);
  return TemporalGraphModel(ErdosRenyi{m, c});
}

TemporalGraphModel TemporalGraphModel::random_connected(std::size_t m, double c) {
  require_nodes(m);
  require_probability(c);
  return TemporalGraphModel(RandomConnected{m, c});
}

TemporalGraphModel TemporalGraphModel::periodic_union(std::size_t window,
                                                      std::vector<Graph> graphs) {
  if (graphs.empty()) throw std::invalid_argument("periodic union needs at least one graph");
  if (window == 0) throw std::invalid_argument("periodic union window must be positive");
  const auto m = graphs.front().node_count();
  for (const auto& g : graphs)
    if (g.node_count() != m) throw std::invalid_argument("periodic union graphs differ in size");
  const auto n = graphs.size();
  for (std::size_t start = 0; start < n; ++start) {
    auto adj = blank_adjacency(m);
    for (std::size_t k = 0; k < window; ++k)
      for (auto [i, j] : graphs[(start + k) % n].edges()) link(adj, i, j);
    if (!is_connected(Graph(std::move(adj))))
      throw std::invalid_argument("periodic union: window starting at graph " +
                                  std::to_string(start + 1) + " is not connected");
  }
  return TemporalGraphModel(PeriodicUnionConnected{window, std::move(graphs)});
}

std::size_t TemporalGraphModel::node_count() const {
  return std::visit(
      [](const auto& k) -> std::size_t {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Static>) return k.graph.node_count();
        else if constexpr (std::is_same_v<K, PeriodicUnionConnected>)
          return k.graphs.front().node_count();
        else return k.node_count;
      },
      kind_);
}

Graph TemporalGraphModel::graph_at(std::size_t t, Rng& rng) const {
  if (t == 0) throw std::invalid_argument("steps are 1-based");
  return std::visit(
      [&](const auto& k) -> Graph {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Static>) return k.graph;
        else if constexpr (std::is_same_v<K, ErdosRenyi>) return sample_er_graph(k.node_count, k.c, rng);
        else if constexpr (std::is_same_v<K, RandomConnected>)
          return sample_random_connected_graph(k.node_count, k.c, rng);
        else return k.graphs[(t - 1) % k.graphs.size()];
      },
      kind_);
}

}  // namespace dmab
