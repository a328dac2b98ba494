#include <lsi/evaluation.hpp>
#include <lsi/pipeline.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

namespace lsi {
namespace {

MatrixXd gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols, double sigma) {
  std::normal_distribution<double> gauss(0.0, sigma);
  MatrixXd m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = gauss(rng);
  }
  return m;
}

Index classify(const LabeledEmbeddings& data, Index k, Index query, std::vector<std::pair<double, Index>>& scratch,
               std::vector<Index>& votes, std::vector<double>& closest) {
  const Index m = data.vectors.rows();
  scratch.clear();
  for (Index j = 0; j < m; ++j) {
    if (j == query) continue;
    scratch.emplace_back((data.vectors.row(j) - data.vectors.row(query)).norm(), j);
  }
  std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end());

  std::fill(votes.begin(), votes.end(), 0);
  std::fill(closest.begin(), closest.end(), std::numeric_limits<double>::infinity());
  for (Index r = 0; r < k; ++r) {
    const Index label = data.labels[scratch[r].second];
    ++votes[label];
    closest[label] = std::min(closest[label], scratch[r].first);
  }
  Index best = 0;
  for (Index l = 1; l < static_cast<Index>(votes.size()); ++l) {
    if (votes[l] > votes[best] || (votes[l] == votes[best] && closest[l] < closest[best])) best = l;
  }
  return best;
}

}  // namespace

LabeledEmbeddings make_labeled(const EmbeddingTable& table,
                               const std::vector<std::pair<std::string, std::string>>& labels) {
  LabeledEmbeddings out;
  std::unordered_map<std::string, Index> label_index;
  std::vector<Index> rows;
  for (const auto& [entity, label] : labels) {
    const auto row = table.find(entity);
    if (!row) continue;
    auto [it, inserted] = label_index.emplace(label, static_cast<Index>(out.label_names.size()));
    if (inserted) out.label_names.push_back(label);
    out.labels.push_back(it->second);
    rows.push_back(*row);
  }
  out.vectors.resize(static_cast<Index>(rows.size()), table.dim());
  for (Index r = 0; r < out.vectors.rows(); ++r) out.vectors.row(r) = table.vector(rows[r]);
  return out;
}

double knn_accuracy(const LabeledEmbeddings& data, Index k, const std::vector<Index>& subset) {
  const Index m = data.vectors.rows();
  if (static_cast<Index>(data.labels.size()) != m) {
    throw InputError("labels and vectors differ in length");
  }
  if (k < 1) throw InputError("k must be at least 1");
  if (k >= m) {
    throw InputError("k = " + std::to_string(k) + " needs more than " + std::to_string(m) + " points");
  }
  for (Index i : subset) {
    if (i < 0 || i >= m) throw InputError("subset index " + std::to_string(i) + " out of range");
  }
  for (Index l : data.labels) {
    if (l < 0 || l >= static_cast<Index>(data.label_names.size())) {
      throw InputError("label index out of range");
    }
  }
  if (subset.empty()) return 0;

  const Index count = static_cast<Index>(subset.size());
  const Index n_labels = static_cast<Index>(data.label_names.size());
  Index correct = 0;
#pragma omp parallel reduction(+ : correct)
  {
    std::vector<std::pair<double, Index>> scratch;
    std::vector<Index> votes(n_labels);
    std::vector<double> closest(n_labels);
#pragma omp for schedule(dynamic, 8)
    for (Index s = 0; s < count; ++s) {
      const Index i = subset[s];
      if (classify(data, k, i, scratch, votes, closest) == data.labels[i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(count);
}

double knn_accuracy(const LabeledEmbeddings& data, Index k) {
  std::vector<Index> all(data.vectors.rows());
  std::iota(all.begin(), all.end(), Index{0});
  return knn_accuracy(data, k, all);
}

void SyntheticTransferSpec::validate() const {
  if (n < 2) throw InputError("synthetic n must be at least 2");
  if (p < 1 || p >= n) throw InputError("synthetic p must satisfy 1 <= p < n");
  if (manifold_dim < 1 || manifold_dim > std::min(affinity_dim, semantic_dim)) {
    throw InputError("manifold_dim must be in [1, min(affinity_dim, semantic_dim)]");
  }
  if (!(noise_sigma >= 0)) throw InputError("noise_sigma must be non-negative");
  if (n_labels < 1 || n_labels > n) throw InputError("n_labels must be in [1, n]");
  if (knn_k < 1) throw InputError("knn_k must be at least 1");
}

SyntheticInstance make_synthetic_instance(const SyntheticTransferSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const MatrixXd latent = gaussian_matrix(rng, spec.n, spec.manifold_dim, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.manifold_dim));
  const MatrixXd to_affinity = gaussian_matrix(rng, spec.manifold_dim, spec.affinity_dim, scale);
  const MatrixXd to_semantic = gaussian_matrix(rng, spec.manifold_dim, spec.semantic_dim, scale);

  SyntheticInstance inst;
  inst.X.data = latent * to_affinity;
  inst.semantic = latent * to_semantic;
  if (spec.noise_sigma > 0) {
    inst.X.data += gaussian_matrix(rng, spec.n, spec.affinity_dim, spec.noise_sigma);
    inst.semantic += gaussian_matrix(rng, spec.n, spec.semantic_dim, spec.noise_sigma);
  }
  for (Index i = 0; i < spec.n; ++i) inst.X.entities.push_back("e" + std::to_string(i));

  // Centers are distinct sample points, so every label owns at least its center.
  std::vector<Index> ids(spec.n);
  std::iota(ids.begin(), ids.end(), Index{0});
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::vector<Index> center_rows(ids.begin(), ids.begin() + spec.n_labels);
  const MatrixXd centers = permute_rows(latent, center_rows);
  inst.labels.resize(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    Index nearest = 0;
    (centers.rowwise() - latent.row(i)).rowwise().squaredNorm().minCoeff(&nearest);
    inst.labels[i] = nearest;
  }
  return inst;
}

TransferReport run_synthetic_transfer(const SyntheticTransferSpec& spec, const ImputationConfig& cfg,
                                      Index delta) {
  const SyntheticInstance inst = make_synthetic_instance(spec);
  const Index n = spec.n;
  const Index p = spec.p;

  EmbeddingTable known(spec.semantic_dim);
  for (Index i = 0; i < p; ++i) known.add(inst.X.entities[i], inst.semantic.row(i).transpose());

  PipelineOptions options;
  options.delta = delta;
  options.imputation = cfg;
  const PipelineResult piped = run_pipeline(inst.X, known, options);
  // Known entities already lead the domain matrix, so the aligned order is the identity.
  const MatrixXd& imputed = piped.run.result.Y;

  LabeledEmbeddings data;
  data.labels = inst.labels;
  for (Index l = 0; l < spec.n_labels; ++l) data.label_names.push_back("c" + std::to_string(l));
  std::vector<Index> hidden(n - p);
  std::iota(hidden.begin(), hidden.end(), p);

  TransferReport report;
  report.iterations = piped.run.result.iterations;
  report.converged = piped.run.result.converged;

  data.vectors = imputed;
  report.imputed_accuracy = knn_accuracy(data, spec.knn_k, hidden);

  data.vectors = inst.semantic;
  report.truth_accuracy = knn_accuracy(data, spec.knn_k, hidden);

  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto known_rows = inst.semantic.topRows(p);
  const Eigen::RowVectorXd mean = known_rows.colwise().mean();
  const Eigen::RowVectorXd stdev =
      ((known_rows.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(p)).sqrt();
  MatrixXd noise = gaussian_matrix(rng, n - p, spec.semantic_dim, 1.0);
  data.vectors.bottomRows(n - p) = (noise.array().rowwise() * stdev.array()).rowwise() + mean.array();
  report.baseline_accuracy = knn_accuracy(data, spec.knn_k, hidden);
  return report;
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "delta") return SweepParameter::Delta;
  if (name == "eta") return SweepParameter::Eta;
  throw InputError("unknown sweep parameter '" + std::string(name) + "' (expected delta or eta)");
}

std::vector<SweepRow> sensitivity_sweep(SweepParameter parameter, const std::vector<double>& values,
                                        const SyntheticTransferSpec& spec, const ImputationConfig& cfg,
                                        Index delta, Index repeats) {
  if (values.empty()) throw InputError("sweep needs at least one value");
  if (repeats < 1) throw InputError("sweep repeats must be at least 1");
  std::vector<SweepRow> rows;
  for (double value : values) {
    ImputationConfig run_cfg = cfg;
    Index run_delta = delta;
    if (parameter == SweepParameter::Delta) {
      if (value != std::floor(value) || value < 1) {
        throw InputError("delta values must be positive integers");
      }
      run_delta = static_cast<Index>(value);
    } else {
      run_cfg.eta = value;
    }
    double total = 0;
    for (Index r = 0; r < repeats; ++r) {
      SyntheticTransferSpec run_spec = spec;
      run_spec.seed = spec.seed + static_cast<std::uint64_t>(r);
      total += run_synthetic_transfer(run_spec, run_cfg, run_delta).imputed_accuracy;
    }
    rows.push_back({value, total / static_cast<double>(repeats)});
  }
  return rows;
}

}  // namespace lsi
