#ifndef LSI_EVALUATION_HPP
#define LSI_EVALUATION_HPP

#include <lsi/core.hpp>
#include <lsi/domain_geometry.hpp>
#include <lsi/embedding_io.hpp>
#include <lsi/imputation.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lsi {

struct LabeledEmbeddings {
  MatrixXd vectors;                     // m x s
  std::vector<Index> labels;            // index into label_names
  std::vector<std::string> label_names;
};

/// Labeled entities that have a vector in `table`, in label-file order. Label indices follow
/// first appearance.
LabeledEmbeddings make_labeled(const EmbeddingTable& table,
                               const std::vector<std::pair<std::string, std::string>>& labels);

/// Leave-one-out k-NN accuracy over `subset`.
///
/// Each point in `subset` is classified by majority vote among its k nearest other points
/// of the whole set (Euclidean, ties in distance go to the smaller index). Vote ties go to
/// the label whose closest voter is nearest, then to the smaller label index.
double knn_accuracy(const LabeledEmbeddings& data, Index k, const std::vector<Index>& subset);
double knn_accuracy(const LabeledEmbeddings& data, Index k);

struct SyntheticTransferSpec {
  Index n = 300;
  Index p = 200;
  Index manifold_dim = 3;
  Index affinity_dim = 10;
  Index semantic_dim = 16;
  double noise_sigma = 0;
  Index n_labels = 5;
  std::uint64_t seed = 0;
  Index knn_k = 5;

  void validate() const;
};

/// Points on a latent linear manifold seen through two random linear maps.
struct SyntheticInstance {
  DomainMatrix X;            // n x affinity_dim, entities "e0", "e1", ...
  MatrixXd semantic;         // n x semantic_dim ground truth
  std::vector<Index> labels; // Voronoi cell of the latent point among n_labels random centers
};

SyntheticInstance make_synthetic_instance(const SyntheticTransferSpec& spec);

struct TransferReport {
  double imputed_accuracy = 0;   // k-NN accuracy of the imputed rows
  double truth_accuracy = 0;     // same rows with their hidden ground-truth vectors
  double baseline_accuracy = 0;  // same rows filled with Gaussian noise matched to Y_p
  Index iterations = 0;
  bool converged = false;
};

/// Hides the last n - p semantic vectors, imputes them from the affinity space and scores
/// the imputed rows with leave-one-out k-NN.
TransferReport run_synthetic_transfer(const SyntheticTransferSpec& spec,
                                      const ImputationConfig& cfg, Index delta);

enum class SweepParameter { Delta, Eta };

SweepParameter parse_sweep_parameter(std::string_view name);

struct SweepRow {
  double value = 0;
  double accuracy = 0;  // mean imputed accuracy over the repeats
};

/// Reruns the synthetic transfer once per value with everything else fixed. With
/// `repeats` > 1 the accuracy is averaged over data seeds spec.seed, spec.seed + 1, ...
std::vector<SweepRow> sensitivity_sweep(SweepParameter parameter, const std::vector<double>& values,
                                        const SyntheticTransferSpec& spec,
                                        const ImputationConfig& cfg, Index delta,
                                        Index repeats = 1);

}  // namespace lsi

#endif  // LSI_EVALUATION_HPP
