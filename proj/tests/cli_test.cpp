#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "crbm/data.hpp"

namespace crbm {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(CRBM_CLI_PATH) + " " + args + " 2>&1";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string value_of(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("crbm_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // A small SIM-LIN pair written as a two-column file.
  std::string pair_file() {
    const auto pairs = gen_simlin({1, 300, 5});
    write_pairs(dir_ / "one", pairs);
    return (dir_ / "one" / "pair0001.txt").string();
  }

  fs::path dir_;
};

TEST_F(Cli, GenSimlinDefaultsAndDeterminism) {
  ASSERT_EQ(run("gen-simlin --out-dir " + path("a")).status, 0);
  ASSERT_EQ(run("gen-simlin --out-dir " + path("b")).status, 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) files += e.path().filename().string().rfind("pair0", 0) == 0;
  EXPECT_EQ(files, 100);
  const std::string first = slurp(dir_ / "a" / "pair0001.txt");
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 1000);
  EXPECT_EQ(first, slurp(dir_ / "b" / "pair0001.txt"));
  EXPECT_EQ(slurp(dir_ / "a" / "pair0100.txt"), slurp(dir_ / "b" / "pair0100.txt"));
  EXPECT_EQ(slurp(dir_ / "a" / "pairmeta.txt"), slurp(dir_ / "b" / "pairmeta.txt"));

  const LoadReport r = load_simulated(dir_ / "a", "SIM-LIN");
  EXPECT_EQ(r.pairs.size(), 100u);
  EXPECT_TRUE(r.diagnostics.empty());
  const auto direct = gen_simlin({});
  EXPECT_LT((r.pairs[41].y - direct[41].y).cwiseAbs().maxCoeff(), 1e-12);

  ASSERT_EQ(run("gen-simlin --pairs 3 --obs 50 --data-seed 9 --out-dir " + path("c")).status, 0);
  EXPECT_NE(slurp(dir_ / "c" / "pair0001.txt"), first);
}

TEST_F(Cli, TrainPairReportsEveryDiagnostic) {
  const Outcome r = run("train-pair " + pair_file());
  ASSERT_EQ(r.status, 0) << r.out;
  for (const char* key : {"gamma", "d_x", "d_y", "decision", "recon_error", "capacity_x", "capacity_y", "epochs_run"})
    EXPECT_FALSE(value_of(r.out, key).empty()) << key;
  const double g = std::stod(value_of(r.out, "gamma"));
  const double dx = std::stod(value_of(r.out, "d_x"));
  const double dy = std::stod(value_of(r.out, "d_y"));
  EXPECT_NEAR(g, dx - dy, 1e-8 * std::max(1.0, std::abs(dx)));
}

TEST_F(Cli, SwapNegatesGamma) {
  const std::string f = pair_file();
  for (int seed : {0, 1, 2}) {
    const std::string s = " --base-seed " + std::to_string(seed);
    const Outcome a = run("train-pair " + f + s);
    const Outcome b = run("train-pair " + f + " --swap" + s);
    ASSERT_EQ(a.status, 0);
    ASSERT_EQ(b.status, 0);
    EXPECT_EQ(std::stod(value_of(b.out, "gamma")), -std::stod(value_of(a.out, "gamma")));
  }
}

TEST_F(Cli, ZeroLambdaDisablesRegularizer) {
  const Outcome r = run("train-pair " + pair_file() + " --lambda 0");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(value_of(r.out, "final_reg"), "0");
  const Outcome with = run("train-pair " + pair_file());
  EXPECT_NE(value_of(with.out, "final_reg"), "0");
}

TEST_F(Cli, ConfigFilePrecedence) {
  const std::string f = pair_file();
  std::ofstream(path("cfg.ini")) << "hidden = 3\nepochs = 20\n";
  ASSERT_EQ(run("--config " + path("cfg.ini") + " train-pair " + f + " --params-out " + path("p.json")).status, 0);
  auto j = nlohmann::json::parse(slurp(dir_ / "p.json"));
  EXPECT_EQ(j["weights"].size(), 3u);

  const Outcome over = run("--config " + path("cfg.ini") + " train-pair " + f + " -m 2 --params-out " + path("q.json"));
  ASSERT_EQ(over.status, 0);
  j = nlohmann::json::parse(slurp(dir_ / "q.json"));
  EXPECT_EQ(j["weights"].size(), 2u);
  EXPECT_LE(std::stoi(value_of(over.out, "epochs_run")), 20);

  ASSERT_EQ(run("train-pair " + f + " --params-out " + path("d.json")).status, 0);
  j = nlohmann::json::parse(slurp(dir_ / "d.json"));
  EXPECT_EQ(j["weights"].size(), 5u);
  EXPECT_EQ(j["sigma"].get<double>(), 0.5);

  std::ofstream(path("bad.ini")) << "hidden = 3\nlearning_rate = 0.1\n";
  const Outcome bad = run("--config " + path("bad.ini") + " train-pair " + f);
  EXPECT_NE(bad.status, 0);
}

TEST_F(Cli, CapacityPrintsBothCoordinates) {
  const Outcome r = run("capacity " + pair_file());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(std::regex_search(r.out, std::regex("capacity_x=[0-9.e+-]+ uniform_reference_x=[0-9.e+-]+")));
  EXPECT_TRUE(std::regex_search(r.out, std::regex("capacity_y=[0-9.e+-]+ uniform_reference_y=[0-9.e+-]+")));
  EXPECT_TRUE(std::regex_search(r.out, std::regex("gamma=\\S+ decision=(XtoY|YtoX|Undecided)")));
}

TEST_F(Cli, BenchOnKnownAnswersGivesExactAccuracy) {
  // Cubic mechanisms on a uniform grid; igci1 gets every orientation right.
  std::vector<CauseEffectPair> pairs;
  for (int k = 0; k < 4; ++k) {
    CauseEffectPair p;
    p.id = pair_name(k + 1);
    p.x = Eigen::VectorXd::LinSpaced(200, 0.0, 1.0);
    p.y = p.x.array().pow(3.0 + k);
    p.weight = k == 0 ? 0.5 : 1.0;
    if (k % 2) p = p.swapped();
    pairs.push_back(p);
  }
  write_pairs(dir_ / "known", pairs);
  const Outcome r = run("bench --dataset KNOWN --method igci1 --data-dir " + path("known") + " --out-dir " + path("out"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("KNOWN igci1 acc=1.0000±0.0000 auc=1.0000"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "results.json"));
  EXPECT_EQ(slurp(dir_ / "out" / "roc.csv").rfind("fpr,tpr\n", 0), 0u);
}

TEST_F(Cli, BenchIsByteReproducible) {
  const std::string args = "bench --pairs 4 --obs 100 --rounds 2 --epochs 30 --threads 2";
  ASSERT_EQ(run(args + " --out-dir " + path("a")).status, 0);
  ASSERT_EQ(run(args + " --out-dir " + path("b")).status, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "results.json"), slurp(dir_ / "b" / "results.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "roc.csv"), slurp(dir_ / "b" / "roc.csv"));
  const auto j = nlohmann::json::parse(slurp(dir_ / "a" / "results.json"));
  EXPECT_EQ(j["summary"]["dataset"], "SIM-LIN");
  EXPECT_EQ(j["summary"]["method"], "crbm");
  EXPECT_EQ(j["records"].size(), 8u);
}

TEST_F(Cli, FailingPairMarksPartialAndExitsNonZero) {
  fs::create_directories(dir_ / "flat");
  std::ofstream(dir_ / "flat" / "pair0001.txt") << "1 2\n2 2\n3 2\n4 2\n";
  std::ofstream(dir_ / "flat" / "pair0002.txt") << "1 2\n2 3\n3 5\n4 4\n5 7\n";
  std::ofstream(dir_ / "flat" / "pairmeta.txt") << "1 1 1 2 2 1\n2 1 1 2 2 1\n";
  const Outcome r = run("bench --dataset SIM-C --rounds 1 --epochs 10 --data-dir " + path("flat") + " --out-dir " +
                    path("out"));
  EXPECT_EQ(r.status, 2) << r.out;
  const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "results.json"));
  EXPECT_TRUE(j["partial"].get<bool>());
  EXPECT_TRUE(j["records"][0]["failed"].get<bool>());
}

TEST_F(Cli, ErrorsExitNonZero) {
  EXPECT_EQ(run("train-pair " + path("missing.txt")).status, 1);
  EXPECT_EQ(run("bench --dataset CEP").status, 1);
  EXPECT_NE(run("bench --method nope --pairs 2 --obs 20 --out-dir " + path("o")).status, 0);
  EXPECT_NE(run("train-pair " + pair_file() + " --scaling sideways").status, 0);
  EXPECT_NE(run("").status, 0);
}

}  // namespace
}  // namespace crbm
