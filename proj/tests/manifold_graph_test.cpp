#include <doctest.h>

#include <lsi/domain_geometry.hpp>
#include <lsi/manifold_graph.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <random>
#include <set>

using lsi::Index;
using lsi::MatrixXd;

namespace {

MatrixXd collinear(std::initializer_list<double> xs) {
  MatrixXd X(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) X(i++, 0) = x;
  return lsi::euclidean_distance_matrix(X);
}

double tree_weight(const std::vector<lsi::Edge<double>>& tree) {
  double w = 0;
  for (const auto& e : tree) w += e.weight;
  return w;
}

}  // namespace

TEST_CASE("MST of collinear points is the path") {
  const auto tree = lsi::build_mst(collinear({0, 1, 3}));
  REQUIRE(tree.size() == 2);
  CHECK(tree[0] == lsi::Edge<double>{0, 1, 1.0});
  CHECK(tree[1] == lsi::Edge<double>{1, 2, 2.0});
}

TEST_CASE("MST with two points") {
  const auto tree = lsi::build_mst(collinear({0, 2}));
  REQUIRE(tree.size() == 1);
  CHECK(tree[0] == lsi::Edge<double>{0, 1, 2.0});
}

TEST_CASE("MST rejects fewer than two points") {
  CHECK_THROWS_AS(lsi::build_mst(MatrixXd::Zero(1, 1)), lsi::InputError);
}

TEST_CASE("MST weight equals exhaustive enumeration on small instances") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd D = lsi::euclidean_distance_matrix(oracle::random_matrix(rng, 6, 3));
    const auto tree = lsi::build_mst(D);
    CHECK(tree.size() == 5);
    CHECK(tree_weight(tree) == doctest::Approx(oracle::exhaustive_mst_weight(D)).epsilon(1e-14));
  }
}

TEST_CASE("duplicate points give zero-weight tree edges") {
  MatrixXd X(3, 2);
  X << 0, 0, 0, 0, 1, 1;
  const auto tree = lsi::build_mst(lsi::euclidean_distance_matrix(X));
  CHECK(tree[0] == lsi::Edge<double>{0, 1, 0.0});
}

TEST_CASE("augmentation on the collinear path") {
  const MatrixXd D = collinear({0, 1, 3});
  const auto g = lsi::augment_to_min_degree(lsi::build_mst(D), D, 2);
  CHECK(lsi::in_neighbors(g, 0) == std::vector<Index>{1, 2});
  CHECK(lsi::in_neighbors(g, 1) == std::vector<Index>{0, 2});
  CHECK(lsi::in_neighbors(g, 2) == std::vector<Index>{0, 1});
  // The added edges are directed: 2 -> 0 and 0 -> 2 were each added for their target.
  CHECK(g.edge_count() == 6);
  CHECK(g.in_edges(0)[1].weight == 3.0);
}

TEST_CASE("delta of one leaves the tree unchanged") {
  std::mt19937_64 rng(5);
  const MatrixXd D = lsi::euclidean_distance_matrix(oracle::random_matrix(rng, 12, 2));
  const auto tree = lsi::build_mst(D);
  const auto g = lsi::augment_to_min_degree(tree, D, 1);
  CHECK(g.edge_count() == 2 * static_cast<Index>(tree.size()));
  for (const auto& e : tree) {
    CHECK(g.has_edge(e.source, e.target));
    CHECK(g.has_edge(e.target, e.source));
  }
}

TEST_CASE("augmentation adds nearest non-neighbors") {
  std::mt19937_64 rng(9);
  const MatrixXd D = lsi::euclidean_distance_matrix(oracle::random_matrix(rng, 20, 3));
  const auto tree = lsi::build_mst(D);
  const Index delta = 4;
  const auto g = lsi::augment_to_min_degree(tree, D, delta);

  std::set<std::pair<Index, Index>> tree_edges;
  for (const auto& e : tree) {
    tree_edges.insert({e.source, e.target});
    tree_edges.insert({e.target, e.source});
  }
  for (Index i = 0; i < 20; ++i) {
    CHECK(g.in_degree(i) >= delta);
    std::vector<Index> tree_in, added;
    for (Index j : lsi::in_neighbors(g, i)) {
      (tree_edges.count({j, i}) ? tree_in : added).push_back(j);
    }
    if (static_cast<Index>(tree_in.size()) >= delta) {
      CHECK(added.empty());
      continue;
    }
    CHECK(static_cast<Index>(tree_in.size() + added.size()) == delta);
    // Rank every non-tree vertex by distance; the added ones must be the closest.
    std::vector<std::pair<double, Index>> ranked;
    for (Index j = 0; j < 20; ++j) {
      if (j != i && std::find(tree_in.begin(), tree_in.end(), j) == tree_in.end()) {
        ranked.emplace_back(D(i, j), j);
      }
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<Index> expected;
    for (std::size_t r = 0; r < added.size(); ++r) expected.push_back(ranked[r].second);
    std::sort(expected.begin(), expected.end());
    CHECK(added == expected);
  }
  CHECK(lsi::is_connected(g));
}

TEST_CASE("graph invariants on random inputs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = 2 + trial * 3;
    const Index delta = 1 + trial % std::min<Index>(8, n - 1);
    const MatrixXd D = lsi::euclidean_distance_matrix(oracle::random_matrix(rng, n, 1 + trial % 4));
    const auto g = lsi::build_mst_knn_graph(D, delta);
    const auto stats = lsi::graph_stats(g);
    CHECK(stats.connected);
    CHECK(stats.min_in_degree >= std::min(delta, n - 1));
    for (const auto& e : g.edges()) CHECK(e.source != e.target);
    // Same input, same graph.
    CHECK(lsi::build_mst_knn_graph(D, delta) == g);
  }
}

TEST_CASE("equal distances resolve to smaller indices") {
  // Four corners of a unit square: every side has length 1.
  MatrixXd X(4, 2);
  X << 0, 0, 1, 0, 0, 1, 1, 1;
  const MatrixXd D = lsi::euclidean_distance_matrix(X);
  const auto tree = lsi::build_mst(D);
  CHECK(tree == std::vector<lsi::Edge<double>>{{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}});
  const auto g = lsi::augment_to_min_degree(tree, D, 2);
  // Vertex 2 has only 0 from the tree; 3 (distance 1) beats 1 (sqrt 2).
  CHECK(lsi::in_neighbors(g, 2) == std::vector<Index>{0, 3});
  CHECK(lsi::in_neighbors(g, 3) == std::vector<Index>{1, 2});
}

TEST_CASE("delta must be below n") {
  const MatrixXd D = collinear({0, 1, 3});
  CHECK_THROWS_AS(lsi::augment_to_min_degree(lsi::build_mst(D), D, 3), lsi::InputError);
  CHECK_THROWS_AS(lsi::augment_to_min_degree(lsi::build_mst(D), D, 0), lsi::InputError);
}

TEST_CASE("in_neighbors") {
  const MatrixXd D = collinear({0, 1, 3});
  const auto g = lsi::build_mst_knn_graph(D, 1);
  CHECK(lsi::in_neighbors(g, 1) == std::vector<Index>{0, 2});
  CHECK_THROWS_AS(lsi::in_neighbors(g, 3), std::out_of_range);
  CHECK_THROWS_AS(lsi::in_neighbors(g, -1), std::out_of_range);

  std::mt19937_64 rng(2);
  const MatrixXd Dr = lsi::euclidean_distance_matrix(oracle::random_matrix(rng, 15, 2));
  const auto gr = lsi::build_mst_knn_graph(Dr, 3);
  const auto all = gr.edges();
  for (Index v = 0; v < 15; ++v) {
    std::vector<Index> expected;
    for (const auto& e : all)
      if (e.target == v) expected.push_back(e.source);
    std::sort(expected.begin(), expected.end());
    CHECK(lsi::in_neighbors(gr, v) == expected);
  }
}

TEST_CASE("anchor reachability") {
  std::mt19937_64 rng(31);
  const MatrixXd D = lsi::euclidean_distance_matrix(oracle::random_matrix(rng, 50, 3));
  const auto g = lsi::build_mst_knn_graph(D, 8);
  for (Index p : {1, 5, 49, 50}) CHECK(lsi::has_anchor_reachability(g, p));

  std::vector<std::pair<Index, Index>> pairs;
  for (const auto& e : g.edges()) pairs.emplace_back(e.source, e.target);
  CHECK(lsi::has_anchor_reachability(g, 5) == oracle::bfs_reaches_all(50, 5, pairs));

  // Hand-built: {0, 1} and {2, 3} are separate components.
  lsi::NeighborGraph<double> split(4, 1);
  split.add_edge(0, 1, 1.0);
  split.add_edge(1, 0, 1.0);
  split.add_edge(2, 3, 1.0);
  split.add_edge(3, 2, 1.0);
  CHECK_FALSE(lsi::has_anchor_reachability(split, 1));
  CHECK_FALSE(lsi::is_connected(split));
  CHECK_FALSE(lsi::graph_stats(split).connected);

  // Direction matters: 2 -> 1 does not let anchor 0 reach 2.
  lsi::NeighborGraph<double> one_way(3, 1);
  one_way.add_edge(0, 1, 1.0);
  one_way.add_edge(2, 1, 1.0);
  CHECK(lsi::is_connected(one_way));
  CHECK_FALSE(lsi::has_anchor_reachability(one_way, 1));
  pairs = {{0, 1}, {2, 1}};
  CHECK_FALSE(oracle::bfs_reaches_all(3, 1, pairs));

  CHECK_THROWS_AS(lsi::has_anchor_reachability(g, 0), lsi::InputError);
}

TEST_CASE("graph rejects self-loops and duplicates") {
  lsi::NeighborGraph<double> g(3, 1);
  CHECK_THROWS_AS(g.add_edge(1, 1, 0.0), lsi::InputError);
  g.add_edge(0, 1, 1.0);
  CHECK_THROWS_AS(g.add_edge(0, 1, 1.0), lsi::InputError);
}

TEST_CASE("graph stats on the three-point fixture") {
  const auto g = lsi::build_mst_knn_graph(collinear({0, 1, 3}), 2);
  const auto s = lsi::graph_stats(g);
  CHECK(s.vertices == 3);
  CHECK(s.edges == 6);
  CHECK(s.min_in_degree == 2);
  CHECK(s.max_in_degree == 2);
  CHECK(s.connected);
}
