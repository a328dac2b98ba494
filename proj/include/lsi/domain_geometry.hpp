#ifndef LSI_DOMAIN_GEOMETRY_HPP
#define LSI_DOMAIN_GEOMETRY_HPP

#include <lsi/core.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

namespace lsi {

/// Entity feature vectors in the affinity space. Row i of `data` describes `entities[i]`.
struct DomainMatrix {
  std::vector<std::string> entities;
  MatrixXd data;

  Index size() const { return data.rows(); }
  Index dim() const { return data.cols(); }
};

/// Throws InputError unless the matrix has n >= 2 unique entities, d >= 1 and finite rows.
void validate(const DomainMatrix& X);

/// Per-entity time series where NaN marks a missing observation.
struct ReturnsTable {
  std::vector<std::string> entities;
  MatrixXd values;  // n x T
};

/// Pairwise Euclidean distances between the rows of `X`.
///
/// Computed from explicit coordinate differences (no Gram-matrix shortcut) so the result
/// agrees with a naive double loop to rounding. Rows are evaluated in parallel; each entry
/// is produced by exactly one thread, so the output does not depend on the thread count.
template <typename Derived>
Matrix<typename Derived::Scalar> euclidean_distance_matrix(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  const Index n = X.rows();
  for (Index i = 0; i < n; ++i) {
    if (!X.row(i).allFinite()) {
      throw InputError("non-finite value in domain matrix at " + detail::row_label(i));
    }
  }
  // Row-major copy keeps each point contiguous for the inner loop.
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts = X;
  Matrix<Scalar> D = Matrix<Scalar>::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      D(j, i) = (pts.row(i) - pts.row(j)).norm();
    }
  }
  D.template triangularView<Eigen::StrictlyUpper>() = D.transpose();
  return D;
}

inline MatrixXd euclidean_distance_matrix(const DomainMatrix& X) {
  for (Index i = 0; i < X.size(); ++i) {
    if (!X.data.row(i).allFinite()) {
      throw InputError("non-finite value in domain matrix at entity '" + X.entities.at(i) + "'");
    }
  }
  return euclidean_distance_matrix(X.data);
}

/// Builds a correlation domain matrix from return series.
///
/// Entities with more than `max_missing_fraction` missing observations are dropped. The
/// remaining gaps are filled with the mean of the observed values of the same column (day)
/// over the retained entities, and row i of the result is row i of the Pearson
/// correlation matrix, so the output is n x n.
DomainMatrix correlation_domain_matrix(const ReturnsTable& returns,
                                       double max_missing_fraction = 0.20);

}  // namespace lsi

#endif  // LSI_DOMAIN_GEOMETRY_HPP
