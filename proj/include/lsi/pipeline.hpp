#ifndef LSI_PIPELINE_HPP
#define LSI_PIPELINE_HPP

#include <lsi/core.hpp>
#include <lsi/domain_geometry.hpp>
#include <lsi/embedding_io.hpp>
#include <lsi/imputation.hpp>
#include <lsi/manifold_graph.hpp>
#include <lsi/nnls.hpp>

#include <vector>

namespace lsi {

struct PipelineOptions {
  Index delta = 8;
  ImputationConfig imputation;
  NnlsOptions nnls;
};

struct StageTimings {
  double align = 0;
  double distance = 0;
  double graph = 0;
  double weights = 0;
  double iterate = 0;
  double merge = 0;
};

struct ImputationRun {
  GraphStats graph;
  WeightMatrixXd weights;  // before fixing the known block; empty when q == 0
  std::vector<Index> zero_weight_columns;
  ImputationResult<double> result;
  StageTimings timings;
};

/// Distance matrix, MST-k-NN graph, simplex weights, fixed known block and power iteration
/// on an already aligned problem. With q == 0 nothing is built and Y equals Y_p.
ImputationRun impute(const AlignedProblem& problem, const PipelineOptions& options);

struct PipelineResult {
  AlignedProblem problem;
  ImputationRun run;
  EmbeddingTable merged;
};

/// align -> impute -> merge.
PipelineResult run_pipeline(const DomainMatrix& X, const EmbeddingTable& table,
                            const PipelineOptions& options);

}  // namespace lsi

#endif  // LSI_PIPELINE_HPP
