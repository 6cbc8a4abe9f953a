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

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dmab/graph.hpp"
#include "oracles.hpp"

using namespace dmab;

namespace {

std::vector<Edge> one_based(const Graph& g) {
  std::vector<Edge> out;
  for (auto [i, j] : g.edges()) out.emplace_back(i + 1, j + 1);
  return out;
}

std::size_t diameter(const Graph& g) {
  std::size_t best = 0;
  for (const auto& row : oracle::floyd_warshall(g))
    for (auto d : row) best = std::max(best, d);
  return best;
}

}  // namespace

TEST_CASE("complete graph edges") {
  CHECK(one_based(make_complete_graph(3)) == std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}});
  const auto single = make_complete_graph(1);
  CHECK(single.node_count() == 1);
  CHECK(single.edge_count() == 0);
  CHECK(make_complete_graph(8).edge_count() == 28);
  CHECK_THROWS_AS(make_complete_graph(0), std::invalid_argument);
}

TEST_CASE("path graph edges and diameter") {
  CHECK(one_based(make_path_graph(3)) == std::vector<Edge>{{1, 2}, {2, 3}});
  CHECK(make_path_graph(2).edge_count() == 1);
  CHECK(diameter(make_path_graph(8)) == 7);
}

TEST_CASE("disconnected clique graph") {
  const auto g = make_disconnected_clique_graph(4, 1);
  CHECK(one_based(g) == std::vector<Edge>{{2, 3}, {2, 4}, {3, 4}});
  CHECK(g.degree(0) == 0);
  CHECK(oracle::components(g) == 2);
  const auto two = make_disconnected_clique_graph(6, 3);
  CHECK(one_based(two) == std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}, {4, 5}, {4, 6}, {5, 6}});
  CHECK_THROWS_AS(make_disconnected_clique_graph(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_disconnected_clique_graph(3, 0), std::invalid_argument);
}

TEST_CASE("two-expander dumbbell examples") {
  const auto g8 = make_two_expander_graph(8, 4.0);
  CHECK(g8.i0 == NodeSet{0, 1});
  CHECK(g8.i1 == NodeSet{6, 7});
  CHECK(one_based(g8.graph) ==
        std::vector<Edge>{{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}});
  const auto fw8 = oracle::floyd_warshall(g8.graph);
  CHECK(fw8[1][6] == 5);
  CHECK(set_distance(g8.graph, g8.i0, g8.i1) == std::optional<std::size_t>(5));

  const auto g4 = make_two_expander_graph(4, 4.0);
  CHECK(g4.i0 == NodeSet{0});
  CHECK(g4.i1 == NodeSet{3});
  CHECK(set_distance(g4.graph, g4.i0, g4.i1) == std::optional<std::size_t>(3));

  CHECK_THROWS_AS(make_two_expander_graph(6, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(make_two_expander_graph(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_two_expander_graph(8, 4.5), std::invalid_argument);
}

TEST_CASE("two-expander distance bound holds on the grid") {
  for (std::size_t m = 4; m <= 64; m += 4) {
    for (double eta : {0.5, 1.0, 2.0, 4.0}) {
      const auto te = make_two_expander_graph(m, eta);
      const auto fw = oracle::floyd_warshall(te.graph);
      std::size_t dist = oracle::kUnreachable;
      for (auto a : te.i0)
        for (auto b : te.i1) dist = std::min(dist, fw[a][b]);
      const auto need = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(m) / 8.0));
      CHECK(dist >= need);
      CHECK(oracle::components(te.graph) == 1);
      CHECK(te.i0.size() == m / 4);
      CHECK(te.i1.size() == m / 4);
      // Each expander is a clique.
      for (const auto* set : {&te.i0, &te.i1})
        for (auto a : *set)
          for (auto b : *set) CHECK(te.graph.adjacent(a, b));
    }
  }
}

TEST_CASE("Erdos-Renyi degenerate and binomial edge count") {
  Rng rng(11);
  CHECK(sample_er_graph(6, 1.0, rng) == make_complete_graph(6));
  CHECK(sample_er_graph(6, 0.0, rng).edge_count() == 0);
  const auto big = sample_er_graph(100, 0.5, rng);
  const double sigma = std::sqrt(4950.0 * 0.25);
  CHECK(std::abs(static_cast<double>(big.edge_count()) - 2475.0) <= 3.0 * sigma);
  CHECK_THROWS_AS(sample_er_graph(5, 1.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_er_graph(5, -0.1, rng), std::invalid_argument);
}

TEST_CASE("random connected graph examples") {
  Rng rng(12);
  CHECK(one_based(sample_random_connected_graph(2, 0.3, rng)) == std::vector<Edge>{{1, 2}});
  CHECK(sample_random_connected_graph(7, 1.0, rng) == make_complete_graph(7));
  for (int i = 0; i < 100; ++i) {
    const auto g = sample_random_connected_graph(50, 0.0, rng);
    CHECK(g.edge_count() == 49);
    CHECK(oracle::components(g) == 1);
  }
  CHECK_THROWS_AS(sample_random_connected_graph(4, 2.0, rng), std::invalid_argument);
}

TEST_CASE("random connected graphs are always connected") {
  Rng rng(13);
  std::size_t connected = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 2 + uniform_index(rng, 30);
    const double c = uniform01(rng) * 0.3;
    const auto g = sample_random_connected_graph(m, c, rng);
    if (oracle::components(g) == 1 && is_connected(g)) ++connected;
  }
  CHECK(connected == 10000);
}

TEST_CASE("spanning tree is uniform over the 16 labeled trees on 4 nodes") {
  Rng rng(14);
  std::map<std::vector<Edge>, std::size_t> freq;
  const std::size_t draws = 32000;
  for (std::size_t i = 0; i < draws; ++i) freq[sample_random_connected_graph(4, 0.0, rng).edges()]++;
  CHECK(freq.size() == 16);  // Cayley: 4^(4-2)
  const double expect = static_cast<double>(draws) / 16.0;
  const double sigma = std::sqrt(expect * 15.0 / 16.0);
  for (const auto& [tree, n] : freq) CHECK(std::abs(static_cast<double>(n) - expect) <= 4.0 * sigma);
}

TEST_CASE("is_connected examples") {
  CHECK(is_connected(make_complete_graph(5)));
  CHECK_FALSE(is_connected(make_disconnected_clique_graph(4, 1)));
  CHECK(is_connected(make_path_graph(8)));
}

TEST_CASE("set_distance examples") {
  const auto path = make_path_graph(8);
  const NodeSet a{0, 1};
  const NodeSet b{5, 6, 7};
  CHECK(set_distance(path, a, b) == std::optional<std::size_t>(4));
  CHECK(set_distance(path, a, a) == std::optional<std::size_t>(0));
  const auto split = make_disconnected_clique_graph(4, 1);
  const NodeSet one{0};
  const NodeSet two{1};
  CHECK_FALSE(set_distance(split, one, two).has_value());
  CHECK_THROWS_AS(set_distance(path, NodeSet{}, b), std::invalid_argument);
}

TEST_CASE("set_distance agrees with Floyd-Warshall") {
  Rng rng(15);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + uniform_index(rng, 12);
    const auto g = sample_er_graph(m, uniform01(rng) * 0.5, rng);
    const auto fw = oracle::floyd_warshall(g);
    NodeSet a;
    NodeSet b;
    for (std::size_t v = 0; v < m; ++v) {
      if (bernoulli(rng, 0.3)) a.push_back(v);
      if (bernoulli(rng, 0.3)) b.push_back(v);
    }
    if (a.empty()) a.push_back(uniform_index(rng, m));
    if (b.empty()) b.push_back(uniform_index(rng, m));
    std::size_t expect = oracle::kUnreachable;
    for (auto x : a)
      for (auto y : b) expect = std::min(expect, fw[x][y]);
    const auto got = set_distance(g, a, b);
    if (expect == oracle::kUnreachable) CHECK_FALSE(got.has_value());
    else CHECK(got == std::optional<std::size_t>(expect));
  }
}

TEST_CASE("metropolis weight examples") {
  const auto k3 = metropolis_weights(make_complete_graph(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(k3(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(metropolis_weights(make_complete_graph(1))(0, 0) == 1.0);
  const auto p3 = metropolis_weights(make_path_graph(3));
  CHECK(p3(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p3(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p3(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p3(2, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p3(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p3(0, 2) == 0.0);
}

TEST_CASE("metropolis weights are doubly stochastic on 1000 random connected graphs") {
  Rng rng(16);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 20);
    const auto g = sample_random_connected_graph(m, uniform01(rng), rng);
    const auto w = metropolis_weights(g);
    CHECK(w.max_row_sum_deviation() < 1e-12);
    CHECK(w.max_col_sum_deviation() < 1e-12);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        CHECK(w(i, j) == w(j, i));
        CHECK(w(i, j) >= 0.0);
        if (w(i, j) > 0.0) CHECK(g.adjacent(i, j));
        if (i != j && g.adjacent(i, j))
          CHECK(w(i, j) == 1.0 / (1.0 + static_cast<double>(std::max(g.degree(i), g.degree(j)))));
      }
    }
  }
}

TEST_CASE("graph validation rejects malformed adjacency") {
  Matrix<unsigned char> asym(3, 3, 0);
  for (std::size_t i = 0; i < 3; ++i) asym(i, i) = 1;
  asym(0, 1) = 1;
  CHECK_THROWS_AS(Graph{asym}, std::invalid_argument);
  Matrix<unsigned char> no_diag(2, 2, 1);
  no_diag(1, 1) = 0;
  CHECK_THROWS_AS(Graph{no_diag}, std::invalid_argument);
}

TEST_CASE("every produced graph keeps symmetry and the true diagonal") {
  Rng rng(17);
  std::vector<Graph> graphs{make_complete_graph(5), make_path_graph(5), make_empty_graph(5),
                            make_disconnected_clique_graph(5, 2), make_two_expander_graph(12, 2.0).graph,
                            sample_er_graph(9, 0.4, rng), sample_random_connected_graph(9, 0.2, rng)};
  for (const auto& g : graphs) {
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      CHECK(g.adjacent(i, i));
      for (std::size_t j = 0; j < g.node_count(); ++j) CHECK(g.adjacent(i, j) == g.adjacent(j, i));
    }
  }
}

TEST_CASE("edge list round trip and format") {
  const auto g = make_two_expander_graph(8, 4.0).graph;
  std::ostringstream out;
  write_edge_list(out, g);
  CHECK(out.str() == "8\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n");
  std::istringstream in(out.str());
  CHECK(read_edge_list(in) == g);
  std::istringstream bad("3\n1 4\n");
  CHECK_THROWS(read_edge_list(bad));
  std::istringstream loop("3\n2 2\n");
  CHECK_THROWS(read_edge_list(loop));
}

TEST_CASE("temporal graph models") {
  Rng rng(18);
  const auto fixed = TemporalGraphModel::make_static(make_path_graph(4));
  CHECK(fixed.is_static());
  CHECK(fixed.graph_at(7, rng) == make_path_graph(4));

  const auto er = TemporalGraphModel::erdos_renyi(6, 0.5);
  Rng a(5);
  Rng b(5);
  for (std::size_t t = 1; t <= 5; ++t) CHECK(er.graph_at(t, a) == er.graph_at(t, b));

  const auto rc = TemporalGraphModel::random_connected(8, 0.1);
  for (std::size_t t = 1; t <= 50; ++t) CHECK(is_connected(rc.graph_at(t, rng)));

  // Two halves of a path, each disconnected alone, connected in union.
  const std::vector<Edge> left{{0, 1}, {2, 3}};
  const std::vector<Edge> right{{1, 2}};
  std::vector<Graph> seq{Graph::from_edges(4, left), Graph::from_edges(4, right)};
  const auto pu = TemporalGraphModel::periodic_union(2, seq);
  CHECK(pu.node_count() == 4);
  CHECK(pu.graph_at(1, rng) == seq[0]);
  CHECK(pu.graph_at(2, rng) == seq[1]);
  CHECK(pu.graph_at(3, rng) == seq[0]);
  CHECK_THROWS_AS(TemporalGraphModel::periodic_union(1, seq), std::invalid_argument);
  CHECK_THROWS_AS(fixed.graph_at(0, rng), std::invalid_argument);
}
