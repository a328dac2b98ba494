#include <lsi/domain_geometry.hpp>

#include <cmath>
#include <string>
#include <unordered_set>

namespace lsi {

void validate(const DomainMatrix& X) {
  if (X.size() < 2) throw InputError("domain matrix needs at least 2 entities");
  if (X.dim() < 1) throw InputError("domain matrix needs at least 1 feature column");
  if (static_cast<Index>(X.entities.size()) != X.size()) {
    throw InputError("domain matrix has " + std::to_string(X.entities.size()) + " ids for " +
                     std::to_string(X.size()) + " rows");
  }
  std::unordered_set<std::string> seen;
  for (Index i = 0; i < X.size(); ++i) {
    if (!seen.insert(X.entities[i]).second) {
      throw InputError("duplicate entity '" + X.entities[i] + "' in domain matrix");
    }
    if (!X.data.row(i).allFinite()) {
      throw InputError("non-finite value in domain matrix at entity '" + X.entities[i] + "'");
    }
  }
}

DomainMatrix correlation_domain_matrix(const ReturnsTable& returns, double max_missing_fraction) {
  const MatrixXd& R = returns.values;
  const Index T = R.cols();
  if (static_cast<Index>(returns.entities.size()) != R.rows()) {
    throw InputError("returns table has mismatched id and row counts");
  }
  if (T < 2) throw InputError("correlation needs at least 2 observations per entity");
  if (!(max_missing_fraction >= 0 && max_missing_fraction <= 1)) {
    throw InputError("max_missing_fraction must lie in [0, 1]");
  }

  std::vector<Index> kept;
  for (Index i = 0; i < R.rows(); ++i) {
    const Index missing = R.row(i).array().isNaN().count();
    if (static_cast<double>(missing) <= max_missing_fraction * static_cast<double>(T)) {
      kept.push_back(i);
    }
  }
  const Index n = static_cast<Index>(kept.size());
  if (n < 2) throw InputError("fewer than 2 entities left after dropping sparse series");

  MatrixXd filled(n, T);
  for (Index r = 0; r < n; ++r) filled.row(r) = R.row(kept[r]);
  for (Index c = 0; c < T; ++c) {
    double sum = 0;
    Index count = 0;
    for (Index r = 0; r < n; ++r) {
      if (!std::isnan(filled(r, c))) {
        sum += filled(r, c);
        ++count;
      }
    }
    if (count == 0) throw InputError("column " + std::to_string(c) + " has no observed values");
    const double mean = sum / static_cast<double>(count);
    for (Index r = 0; r < n; ++r) {
      if (std::isnan(filled(r, c))) filled(r, c) = mean;
    }
  }
  if (!filled.allFinite()) throw InputError("returns contain infinite values");

  DomainMatrix out;
  MatrixXd centered = filled.colwise() - filled.rowwise().mean();
  for (Index r = 0; r < n; ++r) {
    const double norm = centered.row(r).norm();
    // Constant series leave only rounding noise after centering.
    if (!(norm > 1e-12 * filled.row(r).norm())) {
      throw InputError("entity '" + returns.entities[kept[r]] +
                       "' has zero variance; its correlation is undefined");
    }
    centered.row(r) /= norm;
    out.entities.push_back(returns.entities[kept[r]]);
  }
  out.data = (centered * centered.transpose()).cwiseMax(-1.0).cwiseMin(1.0);
  out.data.triangularView<Eigen::StrictlyUpper>() = out.data.transpose();
  out.data.diagonal().setOnes();
  return out;
}

}  // namespace lsi
