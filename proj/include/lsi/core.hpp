#ifndef LSI_CORE_HPP
#define LSI_CORE_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsi {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Sparse n x n row-stochastic weights; row i holds the in-neighbor weights of entity i.
template <typename Scalar>
using WeightMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using WeightMatrixXd = WeightMatrix<double>;

// Malformed or inconsistent user input: bad files, non-finite values, empty anchor sets.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical assumption of the diffusion does not hold (unreachable entities,
// singular I - W_qq, non-finite iterates).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sets the worker count used by the parallel loops; n <= 0 restores the default.
void set_num_threads(int n);
int num_threads();

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

inline std::string row_label(Index row) { return "row " + std::to_string(row); }

}  // namespace detail
}  // namespace lsi

#endif  // LSI_CORE_HPP
