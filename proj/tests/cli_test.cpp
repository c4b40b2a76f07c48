#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "signet/graph.hpp"
#include "signet/serialization.hpp"

namespace fs = std::filesystem;

namespace signet {
namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("signet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    std::string cmd = std::string(SIGNET_CLI) + " " + args + " 2>" + path("stderr.txt");
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string synth(const std::string& name, const std::string& extra = "") const {
    EXPECT_EQ(run("--seed 3 synth --nodes 40 --edge-prob 0.2 --comments " + extra + " --out " + path(name)), 0);
    return path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthIsDeterministicAndParses) {
  auto a = synth("a.tsv");
  auto b = synth("b.tsv");
  EXPECT_EQ(read_text_file(a), read_text_file(b));
  auto g = read_edge_list(a);
  EXPECT_EQ(g.node_count(), 40u);
  EXPECT_GT(g.edge_count(), 0u);
  EXPECT_EQ(run("--seed 4 synth --nodes 40 --edge-prob 0.2 --out " + path("c.tsv")), 0);
  EXPECT_NE(read_text_file(a), read_text_file(path("c.tsv")));
}

TEST_F(CliTest, SentimentTrainAndPredict) {
  auto edges = synth("g.tsv");
  ASSERT_EQ(run("--seed 1 train-sentiment --edges " + edges + " --sample-size 1000 --out " + path("m1.json")), 0);
  ASSERT_EQ(run("--seed 1 train-sentiment --edges " + edges + " --sample-size 1000 --out " + path("m2.json")), 0);
  EXPECT_EQ(read_text_file(path("m1.json")), read_text_file(path("m2.json")));
  auto j = nlohmann::json::parse(read_text_file(path("m1.json")));
  EXPECT_EQ(j["sample_size"].get<std::size_t>(), read_edge_list(edges).edge_count());

  ASSERT_EQ(run("predict-sentiment --model " + path("m1.json") + " --edges " + edges + " --out " + path("p.tsv")), 0);
  auto g = read_edge_list(path("p.tsv"));
  for (const auto& e : g.edges()) {
    ASSERT_TRUE(e.p.has_value());
    EXPECT_GT(*e.p, 0.0);
    EXPECT_LT(*e.p, 1.0);
  }
}

TEST_F(CliTest, SampleSizeRecordedFromCorpus) {
  {
    std::ofstream corpus(path("corpus.tsv"));
    for (int i = 0; i < 1500; ++i) corpus << (i % 3 ? "+1\tgreat work yes\n" : "-1\tpoor record no\n");
  }
  ASSERT_EQ(run("train-sentiment --corpus " + path("corpus.tsv") + " --sample-size 1000 --out " + path("m.json")), 0);
  auto j = nlohmann::json::parse(read_text_file(path("m.json")));
  EXPECT_EQ(j["sample_size"].get<std::size_t>(), 1000u);
}

TEST_F(CliTest, SpeechScoresBuildAgreementGraph) {
  {
    std::ofstream s(path("speech.tsv"));
    s << "a\tb1\t1.2\tY\nb\tb1\t0.8\tY\nc\tb1\t-1.1\tN\na\tb2\t-0.4\tN\nc\tb2\t0.9\tY\nb\tb2\t-0.7\tN\n";
  }
  ASSERT_EQ(run("predict-sentiment --speech-scores " + path("speech.tsv") + " --out " + path("g1.tsv")), 0);
  ASSERT_EQ(run("predict-sentiment --speech-scores " + path("speech.tsv") + " --out " + path("g2.tsv")), 0);
  EXPECT_EQ(read_text_file(path("g1.tsv")), read_text_file(path("g2.tsv")));
  auto g = read_edge_list(path("g1.tsv"));
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
}

TEST_F(CliTest, LearnInferDeterministic) {
  auto edges = synth("g.tsv");
  std::string learn = "--seed 2 learn --edges " + edges + " --epochs 4 --evidence-ratio 0.5";
  ASSERT_EQ(run(learn + " --out " + path("w1.json") + " --log " + path("log1.csv")), 0);
  ASSERT_EQ(run(learn + " --out " + path("w2.json") + " --log " + path("log2.csv")), 0);
  EXPECT_EQ(read_text_file(path("w1.json")), read_text_file(path("w2.json")));
  EXPECT_EQ(read_text_file(path("log1.csv")), read_text_file(path("log2.csv")));
  auto w = weights_from_json(read_text_file(path("w1.json")));
  EXPECT_NO_THROW(w.validate());

  std::string infer = "--seed 2 infer --edges " + edges + " --weights " + path("w1.json") +
                      " --evidence-ratio 0.5";
  ASSERT_EQ(run(infer + " --out " + path("s1.tsv") + " --curves " + path("c1.csv") + " --trace " + path("t1.csv")), 0);
  ASSERT_EQ(run(infer + " --out " + path("s2.tsv") + " --curves " + path("c2.csv") + " --trace " + path("t2.csv")), 0);
  EXPECT_EQ(read_text_file(path("s1.tsv")), read_text_file(path("s2.tsv")));
  EXPECT_EQ(read_text_file(path("c1.csv")), read_text_file(path("c2.csv")));
  EXPECT_EQ(read_text_file(path("t1.csv")).rfind("iter,objective", 0), 0u);
}

TEST_F(CliTest, InferWithZeroTriangleWeightsReproducesP) {
  auto edges = synth("g.tsv");
  auto w = CostWeights::uniform(1.0);
  w.triangle_cost = {0, 0, 0, 0};
  w.prior_weight = 0.0;
  write_text_file(path("w.json"), weights_to_json(w));
  ASSERT_EQ(run("infer --edges " + edges + " --weights " + path("w.json") +
                " --evidence-ratio 0.25 --eps-abs 1e-8 --eps-rel 1e-8 --out " + path("s.tsv")), 0);
  auto g = read_edge_list(edges);
  std::istringstream in(read_text_file(path("s.tsv")));
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    EdgeIndex e;
    std::string src, dst;
    double score;
    row >> e >> src >> dst >> score;
    EXPECT_NEAR(score, *g.edge(e).p, 1e-4);
    ++rows;
  }
  EXPECT_GT(rows, 0u);
}

TEST_F(CliTest, SweepRowCountsAndDeterminism) {
  auto edges = synth("g.tsv");
  std::string sweep = "--seed 5 sweep --edges " + edges +
                      " --ratios 0.125,0.25,0.5,0.75 --samples 2 --epochs 2 --out-dir ";
  ASSERT_EQ(run(sweep + path("r1")), 0);
  ASSERT_EQ(run(sweep + path("r2")), 0);
  for (const char* f : {"folds.csv", "summary.json"}) {
    EXPECT_EQ(read_text_file(path("r1") + "/" + f), read_text_file(path("r2") + "/" + f));
  }
  auto summary = nlohmann::json::parse(read_text_file(path("r1") + "/summary.json"));
  EXPECT_EQ(summary.size(), 4u * 3u);

  std::string drop = "--seed 5 sweep --edges " + edges +
                     " --drop-features 0,5 --samples 2 --epochs 2 --models network,combined --out-dir ";
  ASSERT_EQ(run(drop + path("d1")), 0);
  ASSERT_EQ(run(drop + path("d2")), 0);
  EXPECT_EQ(read_text_file(path("d1") + "/folds.csv"), read_text_file(path("d2") + "/folds.csv"));
  EXPECT_EQ(nlohmann::json::parse(read_text_file(path("d1") + "/summary.json")).size(), 4u);
}

TEST_F(CliTest, LooDeterministic) {
  auto edges = synth("g.tsv");
  ASSERT_EQ(run("--seed 6 loo --edges " + edges + " --with-sentiment --out-dir " + path("l1")), 0);
  ASSERT_EQ(run("--seed 6 loo --edges " + edges + " --with-sentiment --out-dir " + path("l2")), 0);
  EXPECT_EQ(read_text_file(path("l1") + "/folds.csv"), read_text_file(path("l2") + "/folds.csv"));
}

TEST_F(CliTest, ReduceVerifyBundledSample) {
  ASSERT_EQ(run("reduce-verify --instance " + std::string(SIGNET_DATA_DIR) + "/tlsg_2x2x2.txt --out " +
                path("cert.json")), 0);
  auto cert = nlohmann::json::parse(read_text_file(path("cert.json")));
  EXPECT_TRUE(cert["passed"].get<bool>());
  ASSERT_EQ(run("--seed 9 reduce-verify --random 2x2 --out " + path("r1.json")), 0);
  ASSERT_EQ(run("--seed 9 reduce-verify --random 2x2 --out " + path("r2.json")), 0);
  EXPECT_EQ(read_text_file(path("r1.json")), read_text_file(path("r2.json")));
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  {
    std::ofstream cfg(path("run.ini"));
    cfg << "seed=3\n";
  }
  auto reference = synth("ref.tsv");
  ASSERT_EQ(run("--config " + path("run.ini") + " synth --nodes 40 --edge-prob 0.2 --comments --out " + path("cfg.tsv")), 0);
  EXPECT_EQ(read_text_file(reference), read_text_file(path("cfg.tsv")));
  ASSERT_EQ(run("--config " + path("run.ini") + " --seed 8 synth --nodes 40 --edge-prob 0.2 --comments --out " +
                path("flag.tsv")), 0);
  EXPECT_NE(read_text_file(reference), read_text_file(path("flag.tsv")));
}

TEST_F(CliTest, ErrorsExitNonZero) {
  EXPECT_NE(run("infer --edges " + path("missing.tsv") + " --weights " + path("nope.json") + " --out " + path("x")), 0);
  EXPECT_NE(run("synth --nodes 10 --out /nonexistent-dir/x/y.tsv"), 0);
  {
    std::ofstream bad(path("bad.tsv"));
    bad << "# directed=false\n0\t1\t+3\t0.5\n";
  }
  auto w = CostWeights::uniform(1.0);
  write_text_file(path("w.json"), weights_to_json(w));
  EXPECT_NE(run("infer --edges " + path("bad.tsv") + " --weights " + path("w.json") + " --out " + path("s.tsv")), 0);
  EXPECT_NE(read_text_file(path("stderr.txt")).find("line 2"), std::string::npos);
  EXPECT_NE(run("bogus-command"), 0);
}

}  // namespace
}  // namespace signet
