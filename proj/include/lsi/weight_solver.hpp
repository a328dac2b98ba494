#ifndef LSI_WEIGHT_SOLVER_HPP
#define LSI_WEIGHT_SOLVER_HPP

#include <lsi/core.hpp>
#include <lsi/format.hpp>
#include <lsi/manifold_graph.hpp>
#include <lsi/nnls.hpp>

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace lsi {

/// Simplex-constrained reconstruction weights of `x` from the rows of `neighbors` (k x d).
///
/// Minimizes ||x - sum_j w_j n_j||^2 with w >= 0 and sum_j w_j = 1. Using sum w = 1 the
/// residual equals sum_j w_j (n_j - x), so the problem is handed to NNLS on the lifted system
///
///     [ N^T - x 1^T ] u ~ [ 0 ]
///     [     1^T     ]     [ 1 ]
///
/// and the NNLS solution is normalized afterwards. For u = t w the lifted objective is
/// t^2 r(w) + (t - 1)^2, minimized over t at r / (1 + r), which is increasing in r(w); the
/// normalized NNLS minimizer is therefore exactly the simplex minimizer. An all-zero NNLS
/// solution falls back to uniform weights.
template <typename DerivedX, typename DerivedN>
Vector<typename DerivedX::Scalar> solve_row_weights(const Eigen::MatrixBase<DerivedX>& x,
                                                    const Eigen::MatrixBase<DerivedN>& neighbors,
                                                    const NnlsOptions& options = {}) {
  using Scalar = typename DerivedX::Scalar;
  const Index k = neighbors.rows();
  const Index d = neighbors.cols();
  if (k < 1) throw InputError("row weights need at least one neighbor");
  if (x.size() != d) {
    throw InputError("dimension mismatch: point has " + std::to_string(x.size()) +
                     " coordinates, neighbors have " + std::to_string(d));
  }
  if (!x.allFinite() || !neighbors.allFinite()) throw InputError("non-finite coordinates");

  Matrix<Scalar> lifted(d + 1, k);
  lifted.topRows(d) = neighbors.transpose();
  lifted.topRows(d).colwise() -= x.derived().reshaped();
  lifted.row(d).setOnes();
  Vector<Scalar> target = Vector<Scalar>::Zero(d + 1);
  target(d) = Scalar(1);

  Vector<Scalar> w = nnls(lifted, target, options).x;
  const Scalar total = w.sum();
  if (!(total > Scalar(0))) return Vector<Scalar>::Constant(k, Scalar(1) / Scalar(k));
  w /= total;
  return w;
}

/// Row-stochastic weight matrix supported on the in-edges of `g`.
///
/// Row i holds the weights that reconstruct `points.row(i)` from its in-neighbors. Only
/// strictly positive weights are stored. Rows are solved in parallel and assembled in row
/// order.
template <typename Scalar, typename Derived>
WeightMatrix<Scalar> assemble_weight_matrix(const NeighborGraph<Scalar>& g,
                                            const Eigen::MatrixBase<Derived>& points,
                                            const NnlsOptions& options = {}) {
  const Index n = g.size();
  if (points.rows() != n) {
    throw InputError("graph has " + std::to_string(n) + " vertices but domain matrix has " +
                     std::to_string(points.rows()) + " rows");
  }
  std::vector<std::vector<Eigen::Triplet<Scalar, Index>>> rows(n);
  std::vector<std::exception_ptr> failures(n);

#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    try {
      const auto edges = g.in_edges(i);
      Matrix<Scalar> nb(static_cast<Index>(edges.size()), points.cols());
      for (Index r = 0; r < nb.rows(); ++r) nb.row(r) = points.row(edges[r].source).template cast<Scalar>();
      const Vector<Scalar> xi = points.row(i).transpose().template cast<Scalar>();
      const Vector<Scalar> w = solve_row_weights(xi, nb, options);
      for (Index r = 0; r < nb.rows(); ++r) {
        if (w(r) > Scalar(0)) rows[i].emplace_back(i, edges[r].source, w(r));
      }
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw InputError("weights for row " + std::to_string(i) + ": " + e.what());
    }
  }

  std::vector<Eigen::Triplet<Scalar, Index>> triplets;
  for (auto& r : rows) triplets.insert(triplets.end(), r.begin(), r.end());
  WeightMatrix<Scalar> W(n, n);
  W.setFromTriplets(triplets.begin(), triplets.end());
  W.makeCompressed();
  return W;
}

/// Columns with no stored weight: entities that never contribute to a reconstruction.
template <typename Scalar>
std::vector<Index> zero_weight_columns(const WeightMatrix<Scalar>& W) {
  std::vector<char> used(W.cols(), 0);
  for (Index i = 0; i < W.outerSize(); ++i) {
    for (typename WeightMatrix<Scalar>::InnerIterator it(W, i); it; ++it) {
      if (it.value() != Scalar(0)) used[it.col()] = 1;
    }
  }
  std::vector<Index> out;
  for (Index j = 0; j < W.cols(); ++j) {
    if (!used[j]) out.push_back(j);
  }
  return out;
}

/// Coordinate-format dump: one `i j w_ij` line per stored entry, row-major.
template <typename Scalar>
void write_weights(std::ostream& out, const WeightMatrix<Scalar>& W) {
  for (Index i = 0; i < W.outerSize(); ++i) {
    for (typename WeightMatrix<Scalar>::InnerIterator it(W, i); it; ++it) {
      out << i << ' ' << it.col() << ' ' << format_real(it.value()) << '\n';
    }
  }
}

}  // namespace lsi

#endif  // LSI_WEIGHT_SOLVER_HPP
