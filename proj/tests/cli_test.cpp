#include <doctest.h>

#include <lsi/embedding_io.hpp>
#include <lsi/pipeline.hpp>

#include "oracles.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using lsi::Index;
using lsi::MatrixXd;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("lsi_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = std::string(LSI_CLI_PATH) + " " + args + " >" + stdout_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

void save_domain(const lsi::DomainMatrix& X, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  lsi::write_domain_csv(out, X);
}

struct Fixture {
  lsi::DomainMatrix X;
  lsi::EmbeddingTable table{4};
};

Fixture make_fixture(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Fixture f;
  f.X.data = oracle::random_matrix(rng, n, 3);
  const MatrixXd Y = oracle::random_matrix(rng, n, 4);
  for (Index i = 0; i < n; ++i) {
    f.X.entities.push_back("w" + std::to_string(i));
    if (i < p) f.table.add(f.X.entities[i], Y.row(i).transpose());
  }
  return f;
}

}  // namespace

TEST_CASE("cli: impute matches the in-process pipeline") {
  TempDir dir;
  const auto f = make_fixture(50, 30, 7);
  save_domain(f.X, dir / "domain.csv");
  lsi::save_embeddings(f.table, dir / "known.vec");

  const int code = run("impute --domain " + (dir / "domain.csv") + " --embeddings " + (dir / "known.vec") +
                       " --out " + (dir / "out.vec") + " --delta 6 --eta 1e-6 --seed 3 --manifest " +
                       (dir / "run.manifest"));
  REQUIRE(code == 0);

  lsi::PipelineOptions options;
  options.delta = 6;
  options.imputation.eta = 1e-6;
  options.imputation.seed = 3;
  const auto expected = lsi::run_pipeline(f.X, f.table, options);
  CHECK(lsi::load_embeddings(dir / "out.vec") == expected.merged);

  const std::string manifest = slurp(dir / "run.manifest");
  CHECK(manifest.find("q=20\n") != std::string::npos);
  CHECK(manifest.find("converged=true\n") != std::string::npos);
  CHECK(manifest.find("domain_sha256=") != std::string::npos);
}

TEST_CASE("cli: impute with every entity already embedded") {
  TempDir dir;
  const auto f = make_fixture(10, 10, 8);
  save_domain(f.X, dir / "domain.csv");
  lsi::save_embeddings(f.table, dir / "known.vec");
  REQUIRE(run("impute --domain " + (dir / "domain.csv") + " --embeddings " + (dir / "known.vec") +
              " --out " + (dir / "out.vec") + " --manifest " + (dir / "m.txt")) == 0);
  CHECK(lsi::load_embeddings(dir / "out.vec") == f.table);
  CHECK(slurp(dir / "m.txt").find("q=0\n") != std::string::npos);
}

TEST_CASE("cli: iteration cap gives exit code 2") {
  TempDir dir;
  const auto f = make_fixture(40, 20, 9);
  save_domain(f.X, dir / "domain.csv");
  lsi::save_embeddings(f.table, dir / "known.vec");
  CHECK(run("impute --domain " + (dir / "domain.csv") + " --embeddings " + (dir / "known.vec") +
            " --out " + (dir / "out.vec") + " --eta 1e-15 --max-iter 2") == 2);
  CHECK(fs::exists(dir / "out.vec"));
}

TEST_CASE("cli: usage and input errors give exit code 1") {
  TempDir dir;
  CHECK(run("impute --embeddings x --out y") == 1);
  CHECK(run("") == 1);
  CHECK(run("impute --domain " + (dir / "nope.csv") + " --embeddings x --out y") == 1);
  write_file(dir / "domain.csv", "a,1\nb,2\n");
  write_file(dir / "known.vec", "z 1 2\n");
  CHECK(run("impute --domain " + (dir / "domain.csv") + " --embeddings " + (dir / "known.vec") + " --out " +
            (dir / "o.vec")) == 1);
  CHECK(run("sweep --param gamma --values 1") == 1);
}

TEST_CASE("cli: eval knn") {
  TempDir dir;
  write_file(dir / "e.vec", "a 0 0\nb 0.1 0\nc 0 0.1\nd 50 50\ne 50.1 50\nf 50 50.1\n");
  write_file(dir / "labels.csv", "entity,label\na,x\nb,x\nc,x\nd,y\ne,y\nf,y\n");
  REQUIRE(run("eval knn --embeddings " + (dir / "e.vec") + " --labels " + (dir / "labels.csv") + " --k 1,2",
              dir / "out.tsv") == 0);
  CHECK(slurp(dir / "out.tsv") == "k\taccuracy\n1\t1.000\n2\t1.000\n");
}

TEST_CASE("cli: graph-stats on the collinear fixture") {
  TempDir dir;
  write_file(dir / "d.csv", "a,0\nb,1\nc,3\n");
  REQUIRE(run("graph-stats --domain " + (dir / "d.csv") + " --delta 2", dir / "out.txt") == 0);
  CHECK(slurp(dir / "out.txt") ==
        "vertices=3\nedges=6\nmin_in_degree=2\nmax_in_degree=2\nconnected=true\n");
}

TEST_CASE("cli: synth is reproducible") {
  TempDir dir;
  const std::string args = "synth --n 80 --p 50 --seed 4";
  REQUIRE(run(args, dir / "a.tsv") == 0);
  REQUIRE(run(args, dir / "b.tsv") == 0);
  const std::string a = slurp(dir / "a.tsv");
  CHECK(a == slurp(dir / "b.tsv"));
  CHECK(a.rfind("metric\tvalue\nimputed_accuracy\t", 0) == 0);
}

TEST_CASE("cli: sweep and correlate") {
  TempDir dir;
  REQUIRE(run("sweep --n 60 --p 40 --param delta --values 4,6", dir / "s.tsv") == 0);
  const std::string sweep = slurp(dir / "s.tsv");
  CHECK(sweep.rfind("delta\taccuracy\n4\t", 0) == 0);

  write_file(dir / "r.csv", "id,d1,d2,d3\na,1,2,3\nb,2,4,7\nc,3,1,2\n");
  REQUIRE(run("correlate --returns " + (dir / "r.csv") + " --out " + (dir / "c.csv")) == 0);
  const auto X = lsi::load_domain_csv(dir / "c.csv");
  CHECK(X.size() == 3);
  CHECK(X.data(0, 0) == 1.0);
}
