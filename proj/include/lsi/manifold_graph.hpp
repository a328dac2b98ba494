#ifndef LSI_MANIFOLD_GRAPH_HPP
#define LSI_MANIFOLD_GRAPH_HPP

#include <lsi/core.hpp>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace lsi {

/// Disjoint sets with path compression and union by rank.
class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }

  Index find(Index x) {
    Index root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const Index next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  // Returns false when a and b were already in the same set.
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    --components_;
    return true;
  }

  Index components() const { return components_; }

 private:
  std::vector<Index> parent_;
  std::vector<std::uint8_t> rank_;
  Index components_;
};

template <typename Scalar>
struct Edge {
  Index source;
  Index target;
  Scalar weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

template <typename Scalar>
struct InEdge {
  Index source;
  Scalar weight;

  friend bool operator==(const InEdge&, const InEdge&) = default;
};

/// Directed graph stored as per-vertex in-edge lists sorted by source index.
/// An edge (j -> i) means that entity j takes part in reconstructing entity i.
template <typename Scalar>
class NeighborGraph {
 public:
  NeighborGraph(Index n, Index min_degree) : min_degree_(min_degree), in_(n) {
    if (n < 1) throw InputError("graph needs at least one vertex");
  }

  Index size() const { return static_cast<Index>(in_.size()); }
  Index min_degree() const { return min_degree_; }

  bool has_edge(Index source, Index target) const {
    const auto& list = in_.at(target);
    auto it = lower_bound(list, source);
    return it != list.end() && it->source == source;
  }

  void add_edge(Index source, Index target, Scalar weight) {
    check_vertex(source);
    check_vertex(target);
    if (source == target) throw InputError("self-loop on vertex " + std::to_string(source));
    auto& list = in_[target];
    auto it = lower_bound(list, source);
    if (it != list.end() && it->source == source) {
      throw InputError("duplicate edge " + std::to_string(source) + " -> " +
                       std::to_string(target));
    }
    list.insert(it, InEdge<Scalar>{source, weight});
  }

  std::span<const InEdge<Scalar>> in_edges(Index v) const {
    check_vertex(v);
    return in_[v];
  }

  Index in_degree(Index v) const { return static_cast<Index>(in_edges(v).size()); }

  Index edge_count() const {
    Index total = 0;
    for (const auto& list : in_) total += static_cast<Index>(list.size());
    return total;
  }

  // All edges ordered by (target, source).
  std::vector<Edge<Scalar>> edges() const {
    std::vector<Edge<Scalar>> out;
    out.reserve(edge_count());
    for (Index t = 0; t < size(); ++t) {
      for (const auto& e : in_[t]) out.push_back({e.source, t, e.weight});
    }
    return out;
  }

  friend bool operator==(const NeighborGraph&, const NeighborGraph&) = default;

 private:
  void check_vertex(Index v) const {
    if (v < 0 || v >= size()) {
      throw std::out_of_range("vertex " + std::to_string(v) + " out of range [0, " +
                              std::to_string(size()) + ")");
    }
  }

  template <typename List>
  static auto lower_bound(List& list, Index source) {
    return std::lower_bound(list.begin(), list.end(), source,
                            [](const InEdge<Scalar>& e, Index s) { return e.source < s; });
  }

  Index min_degree_;
  std::vector<std::vector<InEdge<Scalar>>> in_;
};

namespace detail {

template <typename Derived>
void check_distance_matrix(const Eigen::MatrixBase<Derived>& D) {
  if (D.rows() != D.cols()) throw InputError("distance matrix must be square");
  if (D.rows() < 2) throw InputError("need at least 2 entities to build a graph");
  if (!D.allFinite()) throw InputError("distance matrix contains non-finite values");
}

}  // namespace detail

/// Kruskal's minimum spanning tree over the complete graph weighted by `D`.
///
/// Returns n - 1 undirected edges (source < target) in acceptance order. Equal weights are
/// resolved by the smaller vertex pair, which makes the tree unique for a given matrix.
template <typename Derived>
std::vector<Edge<typename Derived::Scalar>> build_mst(const Eigen::MatrixBase<Derived>& D) {
  using Scalar = typename Derived::Scalar;
  detail::check_distance_matrix(D);
  const Index n = D.rows();

  struct Candidate {
    Scalar w;
    std::int32_t u;
    std::int32_t v;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      candidates.push_back({D(u, v), static_cast<std::int32_t>(u), static_cast<std::int32_t>(v)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
  });

  UnionFind sets(n);
  std::vector<Edge<Scalar>> tree;
  tree.reserve(n - 1);
  for (const auto& c : candidates) {
    if (sets.unite(c.u, c.v)) {
      tree.push_back({c.u, c.v, c.w});
      if (static_cast<Index>(tree.size()) == n - 1) break;
    }
  }
  return tree;
}

/// Turns a spanning tree into an MST-k-NN graph.
///
/// Tree edges are inserted in both directions. Every vertex whose in-degree is still below
/// `min_degree` then receives directed edges from its nearest vertices that do not already
/// point at it, closest first, until the in-degree reaches `min_degree`. Distance ties go to
/// the smaller index.
template <typename Derived>
NeighborGraph<typename Derived::Scalar> augment_to_min_degree(
    const std::vector<Edge<typename Derived::Scalar>>& tree, const Eigen::MatrixBase<Derived>& D,
    Index min_degree) {
  using Scalar = typename Derived::Scalar;
  detail::check_distance_matrix(D);
  const Index n = D.rows();
  if (min_degree < 1) throw InputError("minimum degree must be at least 1");
  if (min_degree >= n) {
    throw InputError("minimum degree " + std::to_string(min_degree) + " needs more than " +
                     std::to_string(n) + " entities");
  }

  NeighborGraph<Scalar> graph(n, min_degree);
  for (const auto& e : tree) {
    graph.add_edge(e.source, e.target, e.weight);
    graph.add_edge(e.target, e.source, e.weight);
  }

  // Additions into different vertices are independent; collect them first and insert
  // afterwards so the edge set matches sequential evaluation.
  std::vector<std::vector<Index>> additions(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    const Index need = min_degree - graph.in_degree(i);
    if (need <= 0) continue;
    std::vector<Index> candidates;
    candidates.reserve(n);
    for (Index j = 0; j < n; ++j) {
      if (j != i && !graph.has_edge(j, i)) candidates.push_back(j);
    }
    auto closer = [&](Index a, Index b) {
      const Scalar da = D(i, a);
      const Scalar db = D(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(candidates.begin(), candidates.begin() + need, candidates.end(), closer);
    additions[i].assign(candidates.begin(), candidates.begin() + need);
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j : additions[i]) graph.add_edge(j, i, D(i, j));
  }
  return graph;
}

/// MST followed by min-degree augmentation.
template <typename Derived>
NeighborGraph<typename Derived::Scalar> build_mst_knn_graph(const Eigen::MatrixBase<Derived>& D,
                                                            Index min_degree) {
  return augment_to_min_degree(build_mst(D), D, min_degree);
}

/// Sorted sources of the edges pointing into `v`.
template <typename Scalar>
std::vector<Index> in_neighbors(const NeighborGraph<Scalar>& g, Index v) {
  std::vector<Index> out;
  for (const auto& e : g.in_edges(v)) out.push_back(e.source);
  return out;
}

/// True when the graph is connected once edge directions are ignored.
template <typename Scalar>
bool is_connected(const NeighborGraph<Scalar>& g) {
  UnionFind sets(g.size());
  for (Index t = 0; t < g.size(); ++t) {
    for (const auto& e : g.in_edges(t)) sets.unite(e.source, t);
  }
  return sets.components() == 1;
}

namespace detail {

// Breadth-first search from vertices [0, p) along out-edges, given in-adjacency.
template <typename OutAdjacency>
bool all_reachable_from_prefix(Index n, Index p, const OutAdjacency& out) {
  std::vector<char> seen(n, 0);
  std::deque<Index> queue;
  for (Index a = 0; a < p; ++a) {
    seen[a] = 1;
    queue.push_back(a);
  }
  Index reached = p;
  while (!queue.empty()) {
    const Index v = queue.front();
    queue.pop_front();
    for (Index w : out[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        queue.push_back(w);
      }
    }
  }
  return reached == n;
}

inline void check_anchor_count(Index n, Index p) {
  if (p <= 0) throw InputError("no anchors: imputation needs at least one known entity");
  if (p > n) {
    throw InputError("anchor count " + std::to_string(p) + " exceeds entity count " +
                     std::to_string(n));
  }
}

}  // namespace detail

/// True iff every vertex in [p, n) can be reached from some anchor in [0, p) by following
/// directed edges.
template <typename Scalar>
bool has_anchor_reachability(const NeighborGraph<Scalar>& g, Index p) {
  const Index n = g.size();
  detail::check_anchor_count(n, p);
  std::vector<std::vector<Index>> out(n);
  for (Index t = 0; t < n; ++t) {
    for (const auto& e : g.in_edges(t)) out[e.source].push_back(t);
  }
  return detail::all_reachable_from_prefix(n, p, out);
}

struct GraphStats {
  Index vertices = 0;
  Index edges = 0;
  Index min_in_degree = 0;
  Index max_in_degree = 0;
  bool connected = false;
};

template <typename Scalar>
GraphStats graph_stats(const NeighborGraph<Scalar>& g) {
  GraphStats s;
  s.vertices = g.size();
  s.edges = g.edge_count();
  s.min_in_degree = g.in_degree(0);
  s.max_in_degree = g.in_degree(0);
  for (Index v = 1; v < g.size(); ++v) {
    s.min_in_degree = std::min(s.min_in_degree, g.in_degree(v));
    s.max_in_degree = std::max(s.max_in_degree, g.in_degree(v));
  }
  s.connected = is_connected(g);
  return s;
}

}  // namespace lsi

#endif  // LSI_MANIFOLD_GRAPH_HPP
