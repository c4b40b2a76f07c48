#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "signet/evaluation.hpp"

namespace signet {
namespace {

std::vector<ScoredEdge> make_scored(std::vector<double> scores, std::vector<int> truths) {
  std::vector<ScoredEdge> out;
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({i, scores[i], truths[i] == 1});
  return out;
}

std::vector<ScoredEdge> random_scored(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::uniform_real_distribution<double> unit;
  std::vector<ScoredEdge> out;
  for (std::size_t i = 0; i < n; ++i) {
    double s = ties ? std::round(unit(rng) * 6.0) / 6.0 : unit(rng);
    out.push_back({i, s, unit(rng) < 0.6});
  }
  out[0].truth = true;
  out[1].truth = false;
  return out;
}

TEST(AucRoc, Examples) {
  EXPECT_DOUBLE_EQ(auc_roc(make_scored({0.9, 0.8, 0.1}, {1, 1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(auc_roc(make_scored({0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 1})), 0.5);
  EXPECT_DOUBLE_EQ(auc_roc(make_scored({0.2, 0.7}, {1, 0})), 0.0);
  EXPECT_THROW(auc_roc(make_scored({0.2, 0.7}, {1, 1})), Error);
}

TEST(AucNegPr, Examples) {
  EXPECT_DOUBLE_EQ(auc_neg_pr(make_scored({0.9, 0.8, 0.1, 0.05}, {1, 1, 0, 0})), 1.0);
  // 24 negatives out of 100, every score equal.
  std::vector<double> s(100, 0.76);
  std::vector<int> t(100, 1);
  for (int i = 0; i < 24; ++i) t[static_cast<std::size_t>(i) * 4] = 0;
  auto constant = make_scored(s, t);
  EXPECT_NEAR(auc_neg_pr(constant), 0.24, 1e-12);
  EXPECT_DOUBLE_EQ(auc_roc(constant), 0.5);
  EXPECT_THROW(auc_neg_pr(make_scored({0.3, 0.6}, {1, 1})), Error);
}

TEST(AucOracles, RandomInputsMatchPairwiseReferences) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    auto s = random_scored(rng, 2 + rng() % 60, trial % 2 == 0);
    EXPECT_NEAR(auc_roc(s), oracle::pairwise_auc(s), 1e-9);
    EXPECT_NEAR(auc_neg_pr(s), oracle::pairwise_neg_pr(s), 1e-9);
  }
}

TEST(AucRoc, MonotoneInvarianceAndFlip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_scored(rng, 40, false);
    auto t = s;
    for (auto& e : t) e.score = std::exp(3.0 * e.score) / 30.0;
    EXPECT_NEAR(auc_roc(s), auc_roc(t), 1e-12);
    EXPECT_NEAR(auc_neg_pr(s), auc_neg_pr(t), 1e-12);
    auto flipped = s;
    for (auto& e : flipped) e.truth = !*e.truth;
    EXPECT_NEAR(auc_roc(s) + auc_roc(flipped), 1.0, 1e-12);
  }
}

TEST(Curves, EndpointsAndCsv) {
  auto s = make_scored({0.9, 0.6, 0.4, 0.2}, {1, 0, 1, 0});
  auto roc = roc_curve(s);
  EXPECT_DOUBLE_EQ(roc.front().x, 0.0);
  EXPECT_DOUBLE_EQ(roc.front().y, 0.0);
  EXPECT_DOUBLE_EQ(roc.back().x, 1.0);
  EXPECT_DOUBLE_EQ(roc.back().y, 1.0);
  auto pr = neg_pr_curve(s);
  EXPECT_DOUBLE_EQ(pr.front().x, 0.0);
  EXPECT_DOUBLE_EQ(pr.back().x, 1.0);
  std::ostringstream out;
  write_curves_csv(out, s);
  EXPECT_EQ(out.str().rfind("curve,x,y\n", 0), 0u);
}

SignedGraph planted(std::uint64_t seed, std::size_t nodes = 60, double flip = 0.05) {
  SyntheticParams params;
  params.nodes = nodes;
  params.edge_prob = 0.15;
  params.camp_flip_noise = flip;
  return generate_synthetic(params, seed);
}

TEST(PredictSentimentOnly, PassthroughIndependentOfRatio) {
  auto g = planted(1);
  auto p = edge_probabilities(g);
  auto low = predict_sentiment_only(g, mask_all_edges(g, 0.125, 3), p);
  auto high = predict_sentiment_only(g, mask_all_edges(g, 0.75, 3), p);
  ASSERT_EQ(low.size(), g.edge_count());
  for (std::size_t i = 0; i < low.size(); ++i) {
    EXPECT_EQ(low[i].score, high[i].score);
    EXPECT_EQ(low[i].score, *p[low[i].edge]);
  }
  EvidencePartition empty;
  EXPECT_TRUE(predict_sentiment_only(g, empty, p).empty());
  std::vector<std::optional<double>> missing(g.edge_count());
  EXPECT_THROW(predict_sentiment_only(g, mask_all_edges(g, 0.5, 3), missing), Error);
}

TEST(PredictNetworkOnly, IsolatedEdgeGetsPrior) {
  SignedGraph g(2, false, {{0, 1, SignState::ObservedPositive, 0.9, ""}});
  EvidencePartition part;
  part.test_edges = {0};
  auto w = CostWeights::uniform(1.0, 0.3);
  auto r = predict_network_only(g, part, w);
  ASSERT_EQ(r.scored.size(), 1u);
  EXPECT_NEAR(r.scored[0].score, 0.3, 1e-4);
}

TEST(PredictCombined, DecouplingLaws) {
  auto g = planted(2);
  auto part = mask_all_edges(g, 0.5, 4);
  auto p = edge_probabilities(g);

  auto edge_only = CostWeights::uniform(1.0);
  edge_only.triangle_cost = {0, 0, 0, 0};
  edge_only.prior_weight = 0.0;
  auto c = predict_combined(g, part, p, edge_only);
  for (const auto& s : c.scored) EXPECT_NEAR(s.score, *p[s.edge], 1e-4);

  auto no_lambda = CostWeights::uniform(1.0, 0.6);
  no_lambda.lambda1.fill(0.0);
  no_lambda.lambda0.fill(0.0);
  auto a = predict_combined(g, part, p, no_lambda);
  auto b = predict_network_only(g, part, CostWeights::uniform(1.0, 0.6));
  ASSERT_EQ(a.scored.size(), b.scored.size());
  for (std::size_t i = 0; i < a.scored.size(); ++i) {
    EXPECT_EQ(a.scored[i].edge, b.scored[i].edge);
    EXPECT_EQ(a.scored[i].score, b.scored[i].score);
  }
}

TEST(PredictNetworkOnly, SharedEdgeExample) {
  SignedGraph g(4, false,
                {{0, 1, SignState::ObservedNegative, 0.2, ""},
                 {0, 2, SignState::ObservedPositive, std::nullopt, ""},
                 {1, 2, SignState::ObservedPositive, std::nullopt, ""},
                 {0, 3, SignState::ObservedPositive, std::nullopt, ""},
                 {1, 3, SignState::ObservedPositive, std::nullopt, ""}});
  EvidencePartition part;
  part.test_edges = {0, 1, 2, 3, 4};
  part.evidence = {1, 2, 3, 4};
  CostWeights w;
  w.triangle_cost = {5.0, 0.0, 5.0, 0.0};
  auto r = predict_network_only(g, part, w);
  ASSERT_EQ(r.scored.size(), 1u);
  EXPECT_GE(r.scored[0].score, 0.9);
}

TEST(LooFeatures, HistogramCells) {
  // 0 -> 1 is the edge; 0 -> 2 and 1 -> 2 both point at w = 2, positive.
  SignedGraph g(4, true,
                {{0, 1, SignState::ObservedPositive, std::nullopt, ""},
                 {0, 2, SignState::ObservedPositive, std::nullopt, ""},
                 {1, 2, SignState::ObservedPositive, std::nullopt, ""},
                 {0, 3, SignState::ObservedNegative, std::nullopt, ""}});
  auto f = loo_features(g, 0);
  double histogram = 0.0;
  for (std::size_t k = 0; k < 16; ++k) histogram += f[k];
  EXPECT_DOUBLE_EQ(histogram, 1.0);
  EXPECT_DOUBLE_EQ(f[1 * 8 + 1 * 4 + 1 * 2 + 1], 1.0);
  EXPECT_DOUBLE_EQ(f[16], 1.0);  // source positive out-links other than e
  EXPECT_DOUBLE_EQ(f[17], 1.0);  // source negative out-links
  EXPECT_DOUBLE_EQ(f[18], 0.0);  // target positive in-links
  EXPECT_DOUBLE_EQ(f[19], 0.0);

  auto lonely = loo_features(g, 3);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_DOUBLE_EQ(lonely[k], 0.0);
}

TEST(LooFeatures, UndirectedUsesFourTypes) {
  auto g = planted(5);
  std::set<std::size_t> used;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    auto f = loo_features(g, e);
    for (std::size_t k = 0; k < 16; ++k) {
      if (f[k] > 0) used.insert(k);
    }
  }
  for (auto k : used) EXPECT_EQ(k & 0b1010u, 0u) << k;
  EXPECT_LE(used.size(), 4u);
}

TEST(LooTrainEval, PlantedNoiselessIsNearlyPerfect) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = planted(seed, 60, 0.0);
    LooOptions opts;
    opts.seed = seed;
    auto r = loo_train_eval(g, {}, opts);
    ASSERT_EQ(r.summary.size(), 1u);
    EXPECT_EQ(r.summary[0].model, "loo");
    total += r.summary[0].auc_roc_mean;
  }
  EXPECT_GE(total / 10.0, 0.95);
}

TEST(LooTrainEval, InformativeSentimentIsSeparable) {
  auto g = planted(3, 60, 0.2);
  std::vector<std::optional<double>> p(g.edge_count());
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) p[e] = *truth_of(g.edge(e)) ? 0.9 : 0.1;
  auto r = loo_train_eval(g, p, {});
  ASSERT_EQ(r.summary.size(), 1u);
  EXPECT_EQ(r.summary[0].model, "loo+sent");
  EXPECT_DOUBLE_EQ(r.summary[0].auc_roc_mean, 1.0);
}

TEST(Summarize, MeanAndStandardError) {
  std::vector<FoldResult> folds{{"a", 0.5, 0, 0.6, 0.3}, {"a", 0.5, 1, 0.8, 0.5}, {"b", 0.5, 0, 0.7, 0.4}};
  auto s = summarize(folds);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0].auc_roc_mean, 0.7);
  EXPECT_NEAR(s[0].auc_roc_se, std::sqrt(0.02) / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(s[1].folds, 1u);
  EXPECT_DOUBLE_EQ(s[1].auc_roc_se, 0.0);
}

SweepConfig small_config() {
  SweepConfig c;
  c.samples = 2;
  c.learn.epochs = 3;
  return c;
}

TEST(EvidenceSweep, RowCountsAndSentimentPassthrough) {
  auto g = planted(8);
  std::vector<double> ratios{0.125, 0.25, 0.5, 0.75};
  auto cfg = small_config();
  auto r = run_evidence_sweep(g, ratios, cfg);
  EXPECT_EQ(r.summary.size(), ratios.size() * cfg.models.size());
  EXPECT_EQ(r.folds.size(), ratios.size() * cfg.models.size() * cfg.samples);
  std::vector<double> sentiment;
  for (const auto& s : r.summary) {
    if (s.model == "sentiment") sentiment.push_back(s.auc_roc_mean);
    EXPECT_GE(s.auc_roc_mean, 0.0);
    EXPECT_LE(s.auc_roc_mean, 1.0);
    EXPECT_GE(s.auc_roc_se, 0.0);
  }
  ASSERT_EQ(sentiment.size(), 4u);
  for (double v : sentiment) EXPECT_EQ(v, sentiment[0]);

  auto again = run_evidence_sweep(g, ratios, cfg);
  for (std::size_t i = 0; i < r.folds.size(); ++i) EXPECT_EQ(r.folds[i].auc_roc, again.folds[i].auc_roc);

  std::ostringstream out;
  write_fold_csv(out, r.folds);
  EXPECT_EQ(out.str().rfind("model,sweep_param,fold,auc_roc,auc_neg_pr\n", 0), 0u);
}

TEST(EvidenceSweep, ThreadsDoNotChangeResults) {
  auto g = planted(9);
  std::vector<double> ratios{0.5};
  auto cfg = small_config();
  cfg.seeds = {0, 1};
  auto one = run_evidence_sweep(g, ratios, cfg);
  cfg.threads = 3;
  auto three = run_evidence_sweep(g, ratios, cfg);
  ASSERT_EQ(one.folds.size(), three.folds.size());
  for (std::size_t i = 0; i < one.folds.size(); ++i) {
    EXPECT_EQ(one.folds[i].model, three.folds[i].model);
    EXPECT_EQ(one.folds[i].auc_roc, three.folds[i].auc_roc);
  }
}

TEST(EvidenceSweep, BfsMode) {
  auto g = planted(10, 80);
  auto cfg = small_config();
  cfg.mode = SamplingMode::Bfs;
  cfg.bfs_budget = 30;
  cfg.models = {"network"};
  std::vector<double> ratios{0.5};
  auto r = run_evidence_sweep(g, ratios, cfg);
  EXPECT_EQ(r.summary.size(), 1u);
}

TEST(FeatureDropSweep, ConsistentWithEvidenceSweep) {
  auto g = attach_synthetic_comments(planted(11), {}, 12);
  std::vector<LabeledDocument> corpus;
  for (const auto& e : g.edges()) corpus.push_back({e.sign == SignState::ObservedPositive, e.text});
  SentimentTrainOptions sopts;
  sopts.sample_size = 200;
  sopts.seed = 4;
  auto cfg = small_config();
  std::vector<std::size_t> ms{0, 5};
  auto drop = run_feature_drop_sweep(g, corpus, ms, 0.75, sopts, cfg);
  EXPECT_EQ(drop.summary.size(), ms.size() * cfg.models.size());

  auto model = train_sentiment_model(corpus, sopts);
  std::vector<std::optional<double>> p(g.edge_count());
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) p[e] = predict_proba(model, g.edge(e).text);
  std::vector<double> ratio{0.75};
  auto plain = run_evidence_sweep(with_probabilities(g, p), ratio, cfg);
  for (const auto& s : plain.summary) {
    bool found = false;
    for (const auto& d : drop.summary) {
      if (d.model == s.model && d.param == 0.0) {
        EXPECT_NEAR(d.auc_roc_mean, s.auc_roc_mean, 1e-12) << s.model;
        found = true;
      }
    }
    EXPECT_TRUE(found);
  }
  double net0 = -1, net5 = -2;
  for (const auto& d : drop.summary) {
    if (d.model == "network") (d.param == 0.0 ? net0 : net5) = d.auc_roc_mean;
  }
  EXPECT_EQ(net0, net5);

  std::vector<std::size_t> too_many{100000};
  EXPECT_THROW(run_feature_drop_sweep(g, corpus, too_many, 0.75, sopts, cfg), Error);
}

TEST(ScoresTsv, Format) {
  SignedGraph g(2, false, {{0, 1, SignState::Unknown, 0.5, ""}});
  std::vector<ScoredEdge> s{{0, 0.25, std::nullopt}};
  std::ostringstream out;
  write_scores_tsv(out, g, s);
  EXPECT_EQ(out.str(), "edge\tsource\ttarget\tscore\ttruth\n0\t0\t1\t0.25\t?\n");
}

}  // namespace
}  // namespace signet
