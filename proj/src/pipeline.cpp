#include <lsi/pipeline.hpp>
#include <lsi/weight_solver.hpp>

#include <chrono>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lsi {
namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return seconds;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

void set_num_threads(int n) {
#ifdef _OPENMP
  static const int default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : default_threads);
#else
  (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

ImputationRun impute(const AlignedProblem& problem, const PipelineOptions& options) {
  options.imputation.validate();
  ImputationRun run;
  if (problem.q == 0) {
    WeightMatrixXd identity(problem.p, problem.p);
    identity.setIdentity();
    run.result = power_iterate(identity, problem.Yp, options.imputation);
    return run;
  }

  Stopwatch clock;
  const MatrixXd D = euclidean_distance_matrix(problem.X);
  run.timings.distance = clock.lap();

  const auto graph = build_mst_knn_graph(D, options.delta);
  run.graph = graph_stats(graph);
  run.timings.graph = clock.lap();

  run.weights = assemble_weight_matrix(graph, problem.X.data, options.nnls);
  run.zero_weight_columns = zero_weight_columns(run.weights);
  run.timings.weights = clock.lap();

  const WeightMatrixXd fixed = fix_known_block(run.weights, problem.p);
  run.result = power_iterate(fixed, problem.Yp, options.imputation);
  run.timings.iterate = clock.lap();
  return run;
}

PipelineResult run_pipeline(const DomainMatrix& X, const EmbeddingTable& table,
                            const PipelineOptions& options) {
  Stopwatch clock;
  PipelineResult out{align(X, table), {}, EmbeddingTable(table.dim())};
  const double align_seconds = clock.lap();
  out.run = impute(out.problem, options);
  out.run.timings.align = align_seconds;
  clock.lap();
  out.merged = merge_imputed(table, out.problem, out.run.result);
  out.run.timings.merge = clock.lap();
  return out;
}

}  // namespace lsi
