#ifndef LSI_IMPUTATION_HPP
#define LSI_IMPUTATION_HPP

#include <lsi/core.hpp>
#include <lsi/format.hpp>
#include <lsi/manifold_graph.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace lsi {

struct ImputationConfig {
  double eta = 1e-2;        // stop once the l1 relative change of Y_q drops below this
  Index max_iter = 1000;
  std::uint64_t seed = 0;   // seeds the Gaussian start of Y_q
  double init_sigma = 0.1;
  std::ostream* progress = nullptr;  // receives `iter=<t> rel_change=<v>` lines when set

  void validate() const {
    if (!(eta > 0)) throw InputError("eta must be positive");
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    if (!(init_sigma >= 0)) throw InputError("init_sigma must be non-negative");
  }
};

template <typename Scalar>
struct ImputationResult {
  Matrix<Scalar> Y;  // known rows first, then imputed rows
  Index iterations = 0;
  double final_relative_change = 0;
  bool converged = false;
  std::vector<double> relative_changes;  // one entry per iteration
};

/// Replaces rows [0, p) with identity rows so the known block stays fixed under iteration.
template <typename Scalar>
WeightMatrix<Scalar> fix_known_block(const WeightMatrix<Scalar>& W, Index p) {
  const Index n = W.rows();
  if (W.cols() != n) throw InputError("weight matrix must be square");
  if (p <= 0 || p > n) {
    throw InputError("anchor count " + std::to_string(p) + " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<Eigen::Triplet<Scalar, Index>> triplets;
  triplets.reserve(W.nonZeros() + p);
  for (Index i = 0; i < p; ++i) triplets.emplace_back(i, i, Scalar(1));
  for (Index i = p; i < n; ++i) {
    for (typename WeightMatrix<Scalar>::InnerIterator it(W, i); it; ++it) {
      triplets.emplace_back(i, it.col(), it.value());
    }
  }
  WeightMatrix<Scalar> fixed(n, n);
  fixed.setFromTriplets(triplets.begin(), triplets.end());
  fixed.makeCompressed();
  return fixed;
}

namespace detail {

template <typename Scalar>
void check_fixed_block(const WeightMatrix<Scalar>& W, Index p) {
  for (Index i = 0; i < p; ++i) {
    for (typename WeightMatrix<Scalar>::InnerIterator it(W, i); it; ++it) {
      const bool ok = it.col() == i ? it.value() == Scalar(1) : it.value() == Scalar(0);
      if (!ok) throw InputError("row " + std::to_string(i) + " of the known block is not an identity row");
    }
    if (W.coeff(i, i) != Scalar(1)) {
      throw InputError("row " + std::to_string(i) + " of the known block is not an identity row");
    }
  }
}

}  // namespace detail

/// True iff every row in [p, n) is reachable from the known block through positive weights,
/// i.e. following j -> i whenever W(i, j) > 0.
template <typename Scalar>
bool has_anchor_reachability(const WeightMatrix<Scalar>& W, Index p) {
  const Index n = W.rows();
  detail::check_anchor_count(n, p);
  std::vector<std::vector<Index>> out(n);
  for (Index i = p; i < n; ++i) {
    for (typename WeightMatrix<Scalar>::InnerIterator it(W, i); it; ++it) {
      if (it.value() > Scalar(0) && it.col() != i) out[it.col()].push_back(i);
    }
  }
  return detail::all_reachable_from_prefix(n, p, out);
}

/// Diffuses the known rows `Yp` through `Wfixed` (identity known block) until the l1
/// relative change of the unknown block falls below `cfg.eta` or `cfg.max_iter` is hit.
///
/// Each step evaluates Y_q <- W_qp Y_p + W_qq Y_q, which is the lower block of Y <- W Y.
template <typename Scalar, typename Derived>
ImputationResult<Scalar> power_iterate(const WeightMatrix<Scalar>& Wfixed,
                                       const Eigen::MatrixBase<Derived>& Yp,
                                       const ImputationConfig& cfg) {
  cfg.validate();
  const Index n = Wfixed.rows();
  const Index p = Yp.rows();
  const Index s = Yp.cols();
  if (Wfixed.cols() != n) throw InputError("weight matrix must be square");
  detail::check_anchor_count(n, p);
  if (!Yp.allFinite()) throw InputError("known embeddings contain non-finite values");
  detail::check_fixed_block(Wfixed, p);

  ImputationResult<Scalar> result;
  result.Y.resize(n, s);
  result.Y.topRows(p) = Yp;
  const Index q = n - p;
  if (q == 0) {
    result.converged = true;
    return result;
  }
  if (!has_anchor_reachability(Wfixed, p)) {
    throw ConvergenceError("some unknown entities are not reachable from any known entity; "
                           "the diffusion would not converge to a unique result");
  }

  const WeightMatrix<Scalar> Wqp = Wfixed.block(p, 0, q, p);
  const WeightMatrix<Scalar> Wqq = Wfixed.block(p, p, q, q);
  const Matrix<Scalar> inflow = Wqp * Yp;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, cfg.init_sigma);
  Matrix<Scalar> Yq(q, s);
  for (Index c = 0; c < s; ++c) {
    for (Index r = 0; r < q; ++r) Yq(r, c) = static_cast<Scalar>(cfg.init_sigma > 0 ? gauss(rng) : 0.0);
  }

  Matrix<Scalar> next(q, s);
  double change = std::numeric_limits<double>::infinity();
  for (Index t = 1; t <= cfg.max_iter; ++t) {
    next.noalias() = Wqq * Yq;
    next += inflow;
    if (!next.allFinite()) {
      throw ConvergenceError("non-finite values at iteration " + std::to_string(t));
    }
    const double denom = static_cast<double>(Yq.cwiseAbs().sum());
    const double numer = static_cast<double>((next - Yq).cwiseAbs().sum());
    change = denom > 0 ? numer / denom : std::numeric_limits<double>::infinity();
    Yq.swap(next);
    result.iterations = t;
    result.relative_changes.push_back(change);
    if (cfg.progress) *cfg.progress << "iter=" << t << " rel_change=" << format_shortest(static_cast<double>(change)) << '\n';
    if (change < cfg.eta) {
      result.converged = true;
      break;
    }
  }
  result.final_relative_change = change;
  result.Y.bottomRows(q) = Yq;
  return result;
}

/// Fixed point (I - W_qq)^{-1} W_qp Y_p of the diffusion, by dense LU. Intended as an
/// oracle for small systems (q <= 4096).
template <typename Scalar, typename Derived>
Matrix<Scalar> closed_form_solve(const WeightMatrix<Scalar>& Wfixed,
                                 const Eigen::MatrixBase<Derived>& Yp) {
  constexpr Index kMaxUnknowns = 4096;
  const Index n = Wfixed.rows();
  const Index p = Yp.rows();
  detail::check_anchor_count(n, p);
  const Index q = n - p;
  if (q > kMaxUnknowns) {
    throw InputError("closed-form solve refuses " + std::to_string(q) +
                     " unknowns (limit " + std::to_string(kMaxUnknowns) + ")");
  }
  if (q == 0) return Matrix<Scalar>(0, Yp.cols());

  const Matrix<Scalar> Wqq = Matrix<Scalar>(Wfixed.block(p, p, q, q));
  const WeightMatrix<Scalar> Wqp = Wfixed.block(p, 0, q, p);
  const Matrix<Scalar> system = Matrix<Scalar>::Identity(q, q) - Wqq;
  const Eigen::PartialPivLU<Matrix<Scalar>> lu(system);
  if (!(lu.rcond() > 1e-13)) {
    throw ConvergenceError("I - W_qq is singular: the unknown block is not driven by the known block");
  }
  return lu.solve(Matrix<Scalar>(Wqp * Yp));
}

struct SpectralReport {
  double spectral_radius = 0;         // rho(W) before fixing
  Index unit_eigenvalues = 0;         // |lambda - 1| < 1e-6 after fixing the known block
  double unknown_block_radius = 0;    // rho(W_qq)
};

/// Dense eigenvalue diagnostics; limited to n <= 2000.
template <typename Scalar>
SpectralReport spectral_diagnostics(const WeightMatrix<Scalar>& W, Index p) {
  constexpr Index kMaxSize = 2000;
  const Index n = W.rows();
  if (n > kMaxSize) {
    throw InputError("spectral diagnostics use dense eigendecomposition and are limited to n <= " +
                     std::to_string(kMaxSize) + "; they are a diagnostic, not part of imputation");
  }
  detail::check_anchor_count(n, p);
  auto eigenvalues = [](const Matrix<Scalar>& M) {
    return Eigen::EigenSolver<Matrix<Scalar>>(M, false).eigenvalues();
  };

  SpectralReport report;
  report.spectral_radius = static_cast<double>(eigenvalues(Matrix<Scalar>(W)).cwiseAbs().maxCoeff());
  const Matrix<Scalar> fixed = Matrix<Scalar>(fix_known_block(W, p));
  const auto lambda = eigenvalues(fixed);
  for (Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i) - Scalar(1)) < 1e-6) ++report.unit_eigenvalues;
  }
  const Index q = n - p;
  if (q > 0) {
    report.unknown_block_radius =
        static_cast<double>(eigenvalues(fixed.bottomRightCorner(q, q)).cwiseAbs().maxCoeff());
  }
  return report;
}

}  // namespace lsi

#endif  // LSI_IMPUTATION_HPP
