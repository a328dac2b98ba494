// Command-line front end: impute, eval knn, graph-stats, synth, sweep, correlate.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 imputation stopped at --max-iter
// before reaching --eta (the output is still written).

#include <lsi/domain_geometry.hpp>
#include <lsi/embedding_io.hpp>
#include <lsi/evaluation.hpp>
#include <lsi/format.hpp>
#include <lsi/manifold_graph.hpp>
#include <lsi/pipeline.hpp>
#include <lsi/weight_solver.hpp>

#include <CLI11.hpp>

#include "manifest.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using lsi::Index;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

struct CommonFlags {
  int threads = 0;
};

struct ImputeFlags {
  std::string domain;
  std::string embeddings;
  std::string out;
  std::string manifest;
  std::string dump_weights;
  Index delta = 8;
  double eta = 1e-2;
  Index max_iter = 1000;
  std::uint64_t seed = 0;
  double init_sigma = 0.1;
  bool progress = false;
};

struct EvalFlags {
  std::string embeddings;
  std::string labels;
  std::vector<Index> k{5};
  std::string out;
};

struct GraphFlags {
  std::string domain;
  Index delta = 8;
};

struct SynthFlags {
  lsi::SyntheticTransferSpec spec;
  Index delta = 8;
  double eta = 1e-2;
  Index max_iter = 1000;
  std::string out;
  // sweep only
  std::string param;
  std::vector<double> values;
  Index repeats = 1;
};

struct CorrelateFlags {
  std::string returns;
  std::string out;
  double max_missing = 0.20;
};

// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lsi::InputError("cannot write '" + path + "'");
  write(out);
}

int cmd_impute(const ImputeFlags& f, const CommonFlags& common) {
  const lsi::DomainMatrix X = lsi::load_domain_csv(f.domain);
  const lsi::EmbeddingTable table = lsi::load_embeddings(f.embeddings);

  lsi::PipelineOptions options;
  options.delta = f.delta;
  options.imputation.eta = f.eta;
  options.imputation.max_iter = f.max_iter;
  options.imputation.seed = f.seed;
  options.imputation.init_sigma = f.init_sigma;
  if (f.progress) options.imputation.progress = &std::cerr;

  const lsi::PipelineResult piped = lsi::run_pipeline(X, table, options);
  const auto& run = piped.run;
  for (Index col : run.zero_weight_columns) {
    std::cerr << "warning: entity '" << piped.problem.order[col]
              << "' receives no weight in any reconstruction\n";
  }
  lsi::save_embeddings(piped.merged, f.out);
  if (!f.dump_weights.empty()) {
    emit(f.dump_weights, [&](std::ostream& out) { lsi::write_weights(out, run.weights); });
  }

  const bool converged = run.result.converged;
  if (!f.manifest.empty()) {
    lsi::cli::Manifest m;
    m.set("command", "impute");
    m.set("domain", f.domain);
    m.set("domain_sha256", lsi::cli::file_sha256(f.domain));
    m.set("embeddings", f.embeddings);
    m.set("embeddings_sha256", lsi::cli::file_sha256(f.embeddings));
    m.set("out", f.out);
    m.set("dump_weights", f.dump_weights);
    m.set("delta", f.delta);
    m.set("eta", f.eta);
    m.set("max_iter", f.max_iter);
    m.set("seed", f.seed);
    m.set("init_sigma", f.init_sigma);
    m.set("threads", common.threads > 0 ? common.threads : lsi::num_threads());
    m.set("n", piped.problem.p + piped.problem.q);
    m.set("p", piped.problem.p);
    m.set("q", piped.problem.q);
    m.set("dim", table.dim());
    m.set("graph_edges", run.graph.edges);
    m.set("graph_min_in_degree", run.graph.min_in_degree);
    m.set("graph_max_in_degree", run.graph.max_in_degree);
    m.set("graph_connected", run.graph.connected);
    m.set("zero_weight_columns", static_cast<Index>(run.zero_weight_columns.size()));
    m.set("iterations", run.result.iterations);
    m.set("final_relative_change", run.result.final_relative_change);
    m.set("converged", converged);
    m.set("time_align_s", run.timings.align);
    m.set("time_distance_s", run.timings.distance);
    m.set("time_graph_s", run.timings.graph);
    m.set("time_weights_s", run.timings.weights);
    m.set("time_iterate_s", run.timings.iterate);
    m.set("time_merge_s", run.timings.merge);
    m.save(f.manifest);
  }
  if (!converged) {
    std::cerr << "warning: no convergence after " << run.result.iterations
              << " iterations (relative change " << lsi::format_shortest(run.result.final_relative_change)
              << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_eval_knn(const EvalFlags& f) {
  const lsi::EmbeddingTable table = lsi::load_embeddings(f.embeddings);
  const lsi::LabeledEmbeddings data = lsi::make_labeled(table, lsi::load_labels_csv(f.labels));
  std::vector<double> accuracy;
  for (Index k : f.k) accuracy.push_back(lsi::knn_accuracy(data, k));
  emit(f.out, [&](std::ostream& out) {
    out << "k\taccuracy\n";
    for (std::size_t i = 0; i < f.k.size(); ++i) {
      out << f.k[i] << '\t' << lsi::format_fixed(accuracy[i], 3) << '\n';
    }
  });
  return kExitOk;
}

int cmd_graph_stats(const GraphFlags& f) {
  const lsi::DomainMatrix X = lsi::load_domain_csv(f.domain);
  const auto graph = lsi::build_mst_knn_graph(lsi::euclidean_distance_matrix(X), f.delta);
  const lsi::GraphStats s = lsi::graph_stats(graph);
  std::cout << "vertices=" << s.vertices << '\n'
            << "edges=" << s.edges << '\n'
            << "min_in_degree=" << s.min_in_degree << '\n'
            << "max_in_degree=" << s.max_in_degree << '\n'
            << "connected=" << (s.connected ? "true" : "false") << '\n';
  return kExitOk;
}

lsi::ImputationConfig synth_config(const SynthFlags& f) {
  lsi::ImputationConfig cfg;
  cfg.eta = f.eta;
  cfg.max_iter = f.max_iter;
  cfg.seed = f.spec.seed;
  return cfg;
}

int cmd_synth(const SynthFlags& f) {
  const lsi::TransferReport r = lsi::run_synthetic_transfer(f.spec, synth_config(f), f.delta);
  emit(f.out, [&](std::ostream& out) {
    out << "metric\tvalue\n"
        << "imputed_accuracy\t" << lsi::format_fixed(r.imputed_accuracy, 3) << '\n'
        << "truth_accuracy\t" << lsi::format_fixed(r.truth_accuracy, 3) << '\n'
        << "baseline_accuracy\t" << lsi::format_fixed(r.baseline_accuracy, 3) << '\n'
        << "iterations\t" << r.iterations << '\n'
        << "converged\t" << (r.converged ? "true" : "false") << '\n';
  });
  return kExitOk;
}

int cmd_sweep(const SynthFlags& f) {
  const auto parameter = lsi::parse_sweep_parameter(f.param);
  const auto rows =
      lsi::sensitivity_sweep(parameter, f.values, f.spec, synth_config(f), f.delta, f.repeats);
  emit(f.out, [&](std::ostream& out) {
    out << f.param << "\taccuracy\n";
    for (const auto& row : rows) {
      out << lsi::format_shortest(row.value) << '\t' << lsi::format_fixed(row.accuracy, 3) << '\n';
    }
  });
  return kExitOk;
}

int cmd_correlate(const CorrelateFlags& f) {
  const auto X = lsi::correlation_domain_matrix(lsi::load_returns_csv(f.returns), f.max_missing);
  emit(f.out, [&](std::ostream& out) { lsi::write_domain_csv(out, X); });
  return kExitOk;
}

void add_synth_flags(CLI::App* cmd, SynthFlags& f) {
  cmd->add_option("--n", f.spec.n, "Number of entities")->capture_default_str();
  cmd->add_option("--p", f.spec.p, "Number of entities with known vectors")->capture_default_str();
  cmd->add_option("--manifold-dim", f.spec.manifold_dim, "Latent manifold dimension")->capture_default_str();
  cmd->add_option("--affinity-dim", f.spec.affinity_dim, "Domain matrix dimension")->capture_default_str();
  cmd->add_option("--semantic-dim", f.spec.semantic_dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--noise-sigma", f.spec.noise_sigma, "Gaussian noise on both spaces")->capture_default_str();
  cmd->add_option("--n-labels", f.spec.n_labels, "Number of latent clusters")->capture_default_str();
  cmd->add_option("--knn-k", f.spec.knn_k, "k of the k-NN evaluation")->capture_default_str();
  cmd->add_option("--seed", f.spec.seed, "Seed for data and initialization")->capture_default_str();
  cmd->add_option("--delta", f.delta, "Minimum in-degree of the graph")->capture_default_str();
  cmd->add_option("--eta", f.eta, "Relative-change stopping threshold")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Iteration cap")->capture_default_str();
  cmd->add_option("--out", f.out, "TSV report path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent semantic imputation: recover missing embedding vectors from a domain matrix"};
  app.require_subcommand(1);

  CommonFlags common;
  app.add_option("--threads", common.threads, "Worker threads (default: all cores)");

  ImputeFlags impute;
  auto* impute_cmd = app.add_subcommand("impute", "Impute missing embeddings for domain entities");
  impute_cmd->add_option("--domain", impute.domain, "Domain matrix CSV")->required();
  impute_cmd->add_option("--embeddings", impute.embeddings, "Known embeddings (word2vec text)")->required();
  impute_cmd->add_option("--out", impute.out, "Output embeddings path")->required();
  impute_cmd->add_option("--delta", impute.delta, "Minimum in-degree of the MST-k-NN graph")->capture_default_str();
  impute_cmd->add_option("--eta", impute.eta,
                         "Stop when the l1 relative change of the imputed block drops below this; "
                         "scale-free, but tighten it when imputed vectors must be precise")
      ->capture_default_str();
  impute_cmd->add_option("--max-iter", impute.max_iter, "Iteration cap")->capture_default_str();
  impute_cmd->add_option("--seed", impute.seed, "Seed for the random start of the imputed block")->capture_default_str();
  impute_cmd->add_option("--init-sigma", impute.init_sigma, "Std. dev. of the random start")->capture_default_str();
  impute_cmd->add_option("--manifest", impute.manifest, "Write a key=value run manifest");
  impute_cmd->add_option("--dump-weights", impute.dump_weights, "Write the weight matrix as `i j w` lines");
  impute_cmd->add_flag("--progress", impute.progress, "Print per-iteration progress to stderr");
  impute_cmd->add_option("--threads", common.threads, "Worker threads");

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate embeddings");
  eval_cmd->require_subcommand(1);
  auto* knn_cmd = eval_cmd->add_subcommand("knn", "Leave-one-out k-NN categorization accuracy");
  knn_cmd->add_option("--embeddings", eval.embeddings, "Embeddings file")->required();
  knn_cmd->add_option("--labels", eval.labels, "entity,label CSV with header")->required();
  knn_cmd->add_option("--k", eval.k, "Comma-separated k values")->delimiter(',')->capture_default_str();
  knn_cmd->add_option("--out", eval.out, "TSV output path (default stdout)");
  knn_cmd->add_option("--threads", common.threads, "Worker threads");

  GraphFlags graph;
  auto* graph_cmd = app.add_subcommand("graph-stats", "Summarize the MST-k-NN graph of a domain matrix");
  graph_cmd->add_option("--domain", graph.domain, "Domain matrix CSV")->required();
  graph_cmd->add_option("--delta", graph.delta, "Minimum in-degree")->capture_default_str();
  graph_cmd->add_option("--threads", common.threads, "Worker threads");

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic two-space transfer experiment");
  add_synth_flags(synth_cmd, synth);
  synth_cmd->add_option("--threads", common.threads, "Worker threads");

  SynthFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sensitivity of the synthetic transfer to delta or eta");
  add_synth_flags(sweep_cmd, sweep);
  sweep_cmd->add_option("--param", sweep.param, "delta or eta")->required();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->delimiter(',')->required();
  sweep_cmd->add_option("--repeats", sweep.repeats, "Average over this many data seeds")->capture_default_str();
  sweep_cmd->add_option("--threads", common.threads, "Worker threads");

  CorrelateFlags corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Build a correlation domain matrix from returns");
  corr_cmd->add_option("--returns", corr.returns, "Returns CSV (empty cells are missing)")->required();
  corr_cmd->add_option("--out", corr.out, "Domain CSV output path (default stdout)");
  corr_cmd->add_option("--max-missing", corr.max_missing, "Drop entities missing more than this fraction")
      ->capture_default_str();
  corr_cmd->add_option("--threads", common.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    lsi::set_num_threads(common.threads);
    if (impute_cmd->parsed()) return cmd_impute(impute, common);
    if (knn_cmd->parsed()) return cmd_eval_knn(eval);
    if (graph_cmd->parsed()) return cmd_graph_stats(graph);
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    if (corr_cmd->parsed()) return cmd_correlate(corr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
