#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "suffreduce/io.hpp"

namespace fs = std::filesystem;
using namespace suffreduce;

namespace {

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("suffreduce_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path file(const std::string& name, const std::string& text = {}) {
    const fs::path p = dir_ / name;
    if (!text.empty()) std::ofstream(p) << text;
    return p;
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(SUFFREDUCE_CLI) + " " + args + " > " + (dir_ / "stdout").string() +
                            " 2> " + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  SymMatrix matrix(const fs::path& p) { return from_dense(read_csv_file(p), 0.0); }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, CovFromVotes) {
  ASSERT_EQ(run("cov " + file("v.csv", "1,1\n1,-1\n").string()), 0);
  EXPECT_EQ(slurp(dir_ / "stdout"), "1,0\n0,1\n");
  ASSERT_EQ(run("cov " + file("one.csv", "1,-1,1\n").string() + " -o " + (dir_ / "c.csv").string()), 0);
  EXPECT_EQ(matrix(dir_ / "c.csv")(0, 1), -1.0);
}

TEST_F(Cli, CovErrors) {
  EXPECT_EQ(run("cov " + file("e.csv", "\n").string()), 2);
  EXPECT_EQ(run("cov " + file("r.csv", "1,1\n1\n").string()), 2);
  EXPECT_EQ(run("cov " + file("g.csv", "0.5,2\n").string()), 2);
  EXPECT_EQ(run("cov --general " + (dir_ / "g.csv").string()), 0);
  EXPECT_EQ(run("cov " + (dir_ / "missing.csv").string()), 2);
}

TEST_F(Cli, Cluster) {
  const auto m = file("m.csv", "1,.8,.1\n.8,1,.5\n.1,.5,1\n");
  ASSERT_EQ(run("cluster " + m.string() + " --lambda 0.6 --out-dir " + dir_.string()), 0);
  EXPECT_EQ(slurp(dir_ / "clusters.csv"), "1,1,0\n1,1,0\n0,0,1\n");
  const auto d = nlohmann::json::parse(slurp(dir_ / "dendrogram.json"));
  EXPECT_EQ(d["leaves"], 3);
  EXPECT_EQ(d["merges"].size(), 2u);

  fs::remove(dir_ / "clusters.csv");
  ASSERT_EQ(run("cluster " + m.string() + " --out-dir " + dir_.string()), 0);
  EXPECT_FALSE(fs::exists(dir_ / "clusters.csv"));

  ASSERT_EQ(run("cluster " + file("one.csv", "4\n").string() + " --lambda 0.1 --out-dir " + dir_.string()), 0);
  EXPECT_EQ(slurp(dir_ / "clusters.csv"), "1\n");

  EXPECT_EQ(run("cluster " + file("asym.csv", "1,2\n3,1\n").string()), 2);
  EXPECT_EQ(run("cluster " + m.string() + " --lambda -1"), 2);
}

TEST_F(Cli, Threshold) {
  const auto m = file("m.csv", "1,.8,.1\n.8,1,.5\n.1,.5,1\n");
  ASSERT_EQ(run("threshold " + m.string() + " --lambda 0.6 --out-dir " + dir_.string()), 0);
  EXPECT_EQ(slurp(dir_ / "reduced.csv"), "1,0.80000000000000004,0\n0.80000000000000004,1,0\n0,0,1\n");
  const auto c = nlohmann::json::parse(slurp(dir_ / "components.json"));
  EXPECT_EQ(c["blocks"].size(), 2u);
  ASSERT_EQ(run("threshold " + m.string() + " --positive --out-dir " + dir_.string()), 0);
}

TEST_F(Cli, SolveExamples) {
  ASSERT_EQ(run("solve " + file("i.csv", "1,0\n0,1\n").string() + " --estimator glasso --lambda 0 --out-dir " +
                dir_.string()),
            0);
  const SymMatrix g = matrix(dir_ / "estimate.csv");
  EXPECT_NEAR(g(0, 0), 1.0, 1e-8);
  EXPECT_EQ(g(0, 1), 0.0);
  const auto rep = nlohmann::json::parse(slurp(dir_ / "report.json"));
  EXPECT_EQ(rep["converged"], true);

  ASSERT_EQ(run("solve " + file("d.csv", "3,0\n0,1\n").string() + " --estimator fps --k 1 --lambda 0 --out-dir " +
                dir_.string()),
            0);
  const SymMatrix f = matrix(dir_ / "estimate.csv");
  EXPECT_NEAR(f(0, 0), 1.0, 1e-7);
  EXPECT_NEAR(f(1, 1), 0.0, 1e-7);

  ASSERT_EQ(run("solve " + file("x.csv", "3,-0.5,-2\n").string() + " --estimator lasso --lambda 1 --out-dir " +
                dir_.string()),
            0);
  EXPECT_EQ(slurp(dir_ / "estimate.csv"), "2\n0\n-1\n");
}

TEST_F(Cli, SolveDecomposedMatchesDirect) {
  const auto m = file("m.csv", "2,.8,.1,0\n.8,2,.05,.1\n.1,.05,2,.7\n0,.1,.7,2\n");
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run("solve " + m.string() + " --estimator glasso --lambda 0.3 --out-dir " + a.string()), 0);
  ASSERT_EQ(run("solve " + m.string() + " --estimator glasso --lambda 0.3 --decompose on --out-dir " + b.string()), 0);
  const SymMatrix x = matrix(a / "estimate.csv"), y = matrix(b / "estimate.csv");
  EXPECT_LE(max_abs_diff(x, y), 1e-5);
  const auto rep = nlohmann::json::parse(slurp(b / "report.json"));
  EXPECT_EQ(rep["blocks"].size(), 2u);
}

TEST_F(Cli, SolveErrors) {
  const auto m = file("m.csv", "1,0\n0,1\n");
  EXPECT_EQ(run("solve " + m.string() + " --estimator pca --lambda 1"), 2);
  EXPECT_EQ(run("solve " + m.string() + " --estimator glasso"), 2);
  EXPECT_EQ(run("solve " + m.string() + " --estimator glasso --lambda 1 --decompose maybe"), 2);
  EXPECT_EQ(run("solve " + m.string() + " --estimator fps --lambda 1 --k 3"), 2);
  EXPECT_EQ(run("solve " + file("s.csv", "1,1\n1,1\n").string() + " --estimator glasso --lambda 0 --out-dir " +
                dir_.string()),
            3);
  std::string big;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) big += (j ? "," : "") + std::string(i == j ? "1" : "0.3");
    big += "\n";
  }
  EXPECT_EQ(run("solve " + file("big.csv", big).string() + " --estimator ising --lambda 0.1 --out-dir " +
                dir_.string()),
            2);
}

TEST_F(Cli, SolveNonConvergenceExitsThree) {
  const auto m = file("m.csv", "2,.8,.3\n.8,2,.5\n.3,.5,2\n");
  EXPECT_EQ(run("solve " + m.string() + " --estimator glasso --lambda 0.1 --max-iter 2 --out-dir " + dir_.string()),
            3);
  EXPECT_TRUE(fs::exists(dir_ / "report.json"));
}

TEST_F(Cli, Verify) {
  ASSERT_EQ(run("verify --suite minimality --seed 0 -o " + (dir_ / "s.json").string()), 0);
  const auto s = nlohmann::json::parse(slurp(dir_ / "s.json"));
  EXPECT_GT(s["trials"], 0);
  EXPECT_EQ(run("verify --suite corrupted --sizes 5"), 1);
  EXPECT_EQ(run("verify --suite ''"), 2);
  EXPECT_EQ(run("verify --suite sufficiency --sizes 5,x"), 2);
}

TEST_F(Cli, Bench) {
  ASSERT_EQ(run("bench --estimator glasso --p 30 --blocks 3 -o " + (dir_ / "b.json").string()), 0);
  const auto b = nlohmann::json::parse(slurp(dir_ / "b.json"));
  EXPECT_LE(b["deviation"].get<double>(), 1e-5);
  EXPECT_EQ(b["found_blocks"], 3);
  EXPECT_EQ(run("bench --estimator fps"), 2);
  EXPECT_EQ(run("bench --p 5 --blocks 6"), 2);
}

TEST_F(Cli, Usage) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("--help"), 0);
}
