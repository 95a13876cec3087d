#include <doctest.h>

#include <snbclust/cli.hpp>
#include <snbclust/io.hpp>

#include <filesystem>
#include <fstream>
#include <cmath>
#include <sstream>

using namespace snbclust;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("snbclust_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

int run_cli(std::initializer_list<std::string> args) {
  return cli::run(std::vector<std::string>(args));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simulate then fit produces the standard artifacts") {
  TempDir sim_dir, fit_dir;
  CHECK(run_cli({"simulate", "--scheme", "sim1", "--gamma", "1.2", "--seed", "7",
                 "--out", sim_dir / ""}) == cli::kExitOk);
  CHECK(fs::exists(sim_dir / "counts.tsv"));
  CHECK(fs::exists(sim_dir / "truth_labels.csv"));
  CHECK(fs::exists(sim_dir / "truth_genes.csv"));

  CHECK(run_cli({"fit", "--counts", sim_dir / "counts.tsv", "--dispersions",
                 sim_dir / "true_dispersions.csv", "--method", "snbclust", "--k",
                 "3", "--lambda", "5", "--seed", "1", "--restarts", "3",
                 "--threads", "2", "--out", fit_dir / ""}) == cli::kExitOk);
  CHECK(fs::exists(fit_dir / "labels.csv"));
  CHECK(fs::exists(fit_dir / "params.csv"));
  CHECK(fs::exists(fit_dir / "run_meta.txt"));

  auto labels = read_labels_csv(fit_dir / "labels.csv");
  CHECK(labels.labels.size() == 45);
  auto params = read_params_csv(fit_dir / "params.csv");
  CHECK(params.gene_ids.size() == 150);
  CHECK(params.components.cols() == 3);

  // The normalization profile is written alongside the fit.
  CHECK(fs::exists(fit_dir / "size_factors.csv"));
  auto sf = read_id_value_csv(fit_dir / "size_factors.csv", labels.sample_ids);
  CHECK(std::fabs(sf.array().log().mean()) < 1e-9);
  CHECK(fs::exists(fit_dir / "dispersions.csv"));
}

TEST_CASE("fused fit writes the per-gene group structure") {
  TempDir sim_dir, fit_dir;
  REQUIRE(run_cli({"simulate", "--scheme", "sim1", "--gamma", "1.2", "--seed",
                   "23", "--out", sim_dir / ""}) == cli::kExitOk);
  CHECK(run_cli({"fit", "--counts", sim_dir / "counts.tsv", "--dispersions",
                 sim_dir / "true_dispersions.csv", "--method", "snbclust-fused",
                 "--k", "3", "--lambda", "0.5", "--restarts", "2", "--seed", "3",
                 "--out", fit_dir / ""}) == cli::kExitOk);
  CHECK(fs::exists(fit_dir / "groups.csv"));
  const std::string groups = slurp(fit_dir / "groups.csv");
  CHECK(groups.rfind("gene_id,group_1,group_2,group_3", 0) == 0);
  auto labels = read_labels_csv(fit_dir / "labels.csv");
  CHECK(labels.labels.size() == 45);
}

TEST_CASE("missing input file exits 2 and names the path") {
  TempDir dir;
  CHECK(run_cli({"fit", "--counts", dir / "absent.tsv", "--method", "snbclust",
                 "--k", "3", "--out", dir / "o"}) == cli::kExitParse);
}

TEST_CASE("K larger than n exits 3") {
  TempDir dir;
  std::ofstream(dir / "c.tsv") << "gene_id\ta\tb\ng1\t5\t9\ng2\t3\t4\n";
  CHECK(run_cli({"fit", "--counts", dir / "c.tsv", "--method", "snbclust", "--k",
                 "5", "--out", dir / "o"}) == cli::kExitValidation);
}

TEST_CASE("malformed counts exit 2") {
  TempDir dir;
  std::ofstream(dir / "c.tsv") << "gene_id\ta\tb\ng1\t5\t-2\n";
  CHECK(run_cli({"fit", "--counts", dir / "c.tsv", "--method", "snbclust", "--k",
                 "2", "--out", dir / "o"}) == cli::kExitParse);
}

TEST_CASE("numeric degeneracy exits 4") {
  TempDir dir;
  // Constant matrix: sparse K-means has no separating gene.
  std::ofstream(dir / "c.tsv")
      << "gene_id\ta\tb\tc\td\ng1\t5\t5\t5\t5\ng2\t5\t5\t5\t5\n";
  CHECK(run_cli({"fit", "--counts", dir / "c.tsv", "--method", "skmeans", "--k",
                 "2", "--out", dir / "o"}) == cli::kExitNumeric);
}

TEST_CASE("path command writes the grid CSV with one chosen row") {
  TempDir sim_dir, out_dir;
  REQUIRE(run_cli({"simulate", "--scheme", "sim1", "--gamma", "1.2", "--seed",
                   "11", "--out", sim_dir / ""}) == cli::kExitOk);
  CHECK(run_cli({"path", "--counts", sim_dir / "counts.tsv", "--method",
                 "snbclust", "--k", "3", "--lambda-grid", "0.5,2,8,32",
                 "--restarts", "2", "--seed", "3", "--out", out_dir / ""}) ==
        cli::kExitOk);
  const std::string csv = slurp(out_dir / "path.csv");
  CHECK(csv.rfind("lambda,", 0) == 0);
  int rows = 0, chosen = 0;
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    ++rows;
    if (line.size() > 2 && line.substr(line.size() - 2) == ",1") ++chosen;
  }
  CHECK(rows == 4);
  CHECK(chosen == 1);
  CHECK(fs::exists(out_dir / "labels.csv"));
}

TEST_CASE("evaluate computes ARI, AUC and enrichment") {
  TempDir sim_dir, fit_dir, eval_dir;
  // sim2 data: both informative and noise genes, so AUC is defined.
  REQUIRE(run_cli({"simulate", "--scheme", "sim2", "--gamma", "1.2",
                   "--lib-bounds", "0.9,1.1", "--seed", "13", "--out",
                   sim_dir / ""}) == cli::kExitOk);
  REQUIRE(run_cli({"fit", "--counts", sim_dir / "counts.tsv", "--dispersions",
                   sim_dir / "true_dispersions.csv", "--method", "snbclust",
                   "--k", "3", "--lambda", "2", "--restarts", "3", "--seed", "5",
                   "--out", fit_dir / ""}) == cli::kExitOk);

  // Identical label files give ARI exactly 1.
  CHECK(run_cli({"evaluate", "--labels", sim_dir / "truth_labels.csv", "--truth",
                 sim_dir / "truth_labels.csv", "--out", eval_dir / ""}) ==
        cli::kExitOk);
  const std::string eval1 = slurp(eval_dir / "evaluation.csv");
  CHECK(eval1.find("ari,1") != std::string::npos);

  // Gene sets over the simulated universe.
  {
    std::ofstream gs(eval_dir / "sets.txt");
    gs << "first_block\t";
    for (int j = 1; j <= 50; ++j) gs << "g" << j << (j < 50 ? "," : "\n");
    gs << "scattered\tg3,g300,g999\n";
  }
  CHECK(run_cli({"evaluate", "--labels", fit_dir / "labels.csv", "--truth",
                 sim_dir / "truth_labels.csv", "--params", fit_dir / "params.csv",
                 "--truth-genes", sim_dir / "truth_genes.csv", "--gene-sets",
                 eval_dir / "sets.txt", "--out", eval_dir / ""}) == cli::kExitOk);
  CHECK(fs::exists(eval_dir / "enrichment.csv"));
  const std::string enr = slurp(eval_dir / "enrichment.csv");
  CHECK(enr.rfind("set,a,b,c,d,p,fdr", 0) == 0);
  const std::string eval2 = slurp(eval_dir / "evaluation.csv");
  CHECK(eval2.find("auc,") != std::string::npos);
}

TEST_CASE("benchmark reports are byte-identical across runs") {
  TempDir d1, d2;
  auto args = [&](const TempDir& d) {
    return std::vector<std::string>{
        "benchmark", "--scheme", "sim1",     "--gamma",   "1.2",
        "--replicates", "2",     "--methods", "skmeans", "--seed",
        "9",         "--threads", "2",       "--out",     d / ""};
  };
  CHECK(cli::run(args(d1)) == cli::kExitOk);
  CHECK(cli::run(args(d2)) == cli::kExitOk);
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK(slurp(d1 / "replicates.csv") == slurp(d2 / "replicates.csv"));
  CHECK(slurp(d1 / "summary.csv").rfind("method,gamma,", 0) == 0);
}

TEST_CASE("manifest file provides defaults, flags override") {
  TempDir dir;
  std::ofstream(dir / "run.manifest") << "scheme=sim1\ngamma=0.8\nseed=21\nout="
                                      << (dir / "from_manifest") << "\n";
  CHECK(run_cli({"simulate", "--manifest", dir / "run.manifest", "--gamma",
                 "1.2"}) == cli::kExitOk);
  const std::string meta = slurp(std::string(dir / "from_manifest") + "/run_meta.txt");
  CHECK(meta.find("gamma=1.2") != std::string::npos);  // flag wins
  CHECK(meta.find("seed=21") != std::string::npos);    // manifest fills the rest
}

TEST_CASE("print-config dumps the resolved settings without running") {
  TempDir dir;
  CHECK(run_cli({"simulate", "--scheme", "sim1", "--gamma", "0.4", "--out",
                 dir / "never", "--print-config"}) == cli::kExitOk);
  CHECK_FALSE(fs::exists(dir / "never"));
}

TEST_CASE("unknown flags and bad numbers exit 2") {
  CHECK(run_cli({"fit", "--nonsense"}) == cli::kExitParse);
  TempDir dir;
  std::ofstream(dir / "c.tsv") << "gene_id\ta\tb\ng1\t5\t9\ng2\t3\t4\n";
  CHECK(run_cli({"fit", "--counts", dir / "c.tsv", "--method", "snbclust", "--k",
                 "two", "--out", dir / "o"}) == cli::kExitParse);
}
