#ifndef LSI_NNLS_HPP
#define LSI_NNLS_HPP

#include <lsi/core.hpp>

#include <Eigen/QR>

#include <limits>
#include <vector>

namespace lsi {

struct NnlsOptions {
  // The solver stops once no inactive coordinate has a gradient component above this value.
  double gradient_tolerance = 1e-10;
  // Cap on outer (activation) steps; a negative value means 3 * number of columns.
  Index max_iterations = -1;
};

template <typename Scalar>
struct NnlsResult {
  Vector<Scalar> x;
  Index iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
///
/// The passive-set subproblems are solved with a complete orthogonal decomposition, so
/// rank-deficient column sets (duplicate neighbors) yield the minimum-norm solution. A
/// coordinate whose unconstrained value is non-positive right after it enters the passive
/// set is blocked until the next successful step, as in the reference Fortran code.
template <typename DerivedA, typename DerivedB>
NnlsResult<typename DerivedA::Scalar> nnls(const Eigen::MatrixBase<DerivedA>& A,
                                           const Eigen::MatrixBase<DerivedB>& b,
                                           const NnlsOptions& options = {}) {
  using Scalar = typename DerivedA::Scalar;
  const Index m = A.rows();
  const Index k = A.cols();
  if (b.size() != m) throw InputError("nnls: right-hand side length does not match rows of A");
  if (k < 1) throw InputError("nnls: need at least one column");
  if (!A.allFinite() || !b.allFinite()) throw InputError("nnls: non-finite input");

  const Index cap = options.max_iterations < 0 ? 3 * k : options.max_iterations;
  const Scalar tol = static_cast<Scalar>(options.gradient_tolerance);

  NnlsResult<Scalar> result;
  result.x = Vector<Scalar>::Zero(k);
  Vector<Scalar>& x = result.x;
  std::vector<char> passive(k, 0);
  std::vector<char> blocked(k, 0);
  Vector<Scalar> gradient = A.transpose() * b;

  std::vector<Index> active_cols;
  auto solve_passive = [&](Vector<Scalar>& z) {
    active_cols.clear();
    for (Index j = 0; j < k; ++j) {
      if (passive[j]) active_cols.push_back(j);
    }
    Matrix<Scalar> sub(m, static_cast<Index>(active_cols.size()));
    for (Index c = 0; c < sub.cols(); ++c) sub.col(c) = A.col(active_cols[c]);
    const Vector<Scalar> sol = sub.completeOrthogonalDecomposition().solve(b);
    z.setZero(k);
    for (Index c = 0; c < sub.cols(); ++c) z(active_cols[c]) = sol(c);
  };

  Vector<Scalar> z(k);
  while (true) {
    Index entering = -1;
    Scalar best = tol;
    for (Index j = 0; j < k; ++j) {
      if (!passive[j] && !blocked[j] && gradient(j) > best) {
        best = gradient(j);
        entering = j;
      }
    }
    if (entering < 0) {
      result.converged = true;
      break;
    }
    if (result.iterations >= cap) break;
    ++result.iterations;

    passive[entering] = 1;
    solve_passive(z);
    if (z(entering) <= Scalar(0)) {
      passive[entering] = 0;
      blocked[entering] = 1;
      continue;
    }

    while (true) {
      bool feasible = true;
      for (Index j : active_cols) {
        if (z(j) <= Scalar(0)) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      // Step toward z until the first passive coordinate hits zero, then drop it.
      Scalar alpha = std::numeric_limits<Scalar>::infinity();
      Index leaving = -1;
      for (Index j : active_cols) {
        if (z(j) <= Scalar(0)) {
          const Scalar ratio = x(j) / (x(j) - z(j));
          if (ratio < alpha) {
            alpha = ratio;
            leaving = j;
          }
        }
      }
      x += alpha * (z - x);
      for (Index j : active_cols) {
        if (j == leaving || x(j) <= Scalar(0)) {
          x(j) = Scalar(0);
          passive[j] = 0;
        }
      }
      solve_passive(z);
    }

    std::fill(blocked.begin(), blocked.end(), 0);
    gradient = A.transpose() * (b - A * x);
  }
  return result;
}

}  // namespace lsi

#endif  // LSI_NNLS_HPP
