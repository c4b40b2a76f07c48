#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "json.hpp"

#include "signet/serialization.hpp"

namespace signet {
namespace {

TEST(WeightsJson, RoundTripExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit;
  CostWeights w;
  for (auto& v : w.lambda1) v = unit(rng) * 3;
  for (auto& v : w.lambda0) v = unit(rng) / 7;
  for (auto& v : w.triangle_cost) v = unit(rng);
  w.prior_weight = 0.1;
  w.prior = 0.76;
  EXPECT_EQ(weights_from_json(weights_to_json(w)), w);
}

TEST(WeightsJson, KeysAndValidation) {
  auto j = nlohmann::json::parse(weights_to_json(CostWeights::uniform(1.0)));
  for (const char* key : {"lambda1", "lambda0", "d", "prior_weight", "prior"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["lambda1"].size(), 10u);
  EXPECT_EQ(j["d"].size(), 4u);
  j["d"] = {1, 2, 3};
  EXPECT_THROW(weights_from_json(j.dump()), Error);
  j["d"] = {1, 2, 3, -4};
  EXPECT_THROW(weights_from_json(j.dump()), Error);
  EXPECT_THROW(weights_from_json("{not json"), Error);
}

TEST(SentimentModelJson, RoundTripExact) {
  SentimentModel m;
  m.vocab = Vocabulary({"good", "bad", "meh"});
  m.model.weights = Eigen::VectorXd(3);
  m.model.weights << 0.1234567890123, -2.5, 1e-17;
  m.model.bias = -0.3;
  m.model.l2 = 0.01;
  m.sample_size = 1000;
  m.seed = 42;
  auto back = sentiment_model_from_json(sentiment_model_to_json(m));
  EXPECT_EQ(back.vocab.terms(), m.vocab.terms());
  EXPECT_EQ(back.model.weights, m.model.weights);
  EXPECT_EQ(back.model.bias, m.model.bias);
  EXPECT_EQ(back.model.l2, m.model.l2);
  EXPECT_EQ(back.sample_size, 1000u);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(sentiment_model_to_json(back), sentiment_model_to_json(m));
}

TEST(SweepSummaryJson, Fields) {
  std::vector<SweepReport> rows{{"network", 0.5, 4, 0.7, 0.01, 0.4, 0.02}};
  auto j = nlohmann::json::parse(sweep_summary_json(rows));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["model"], "network");
  EXPECT_DOUBLE_EQ(j[0]["auc_roc_mean"].get<double>(), 0.7);
  EXPECT_DOUBLE_EQ(j[0]["auc_neg_pr_se"].get<double>(), 0.02);
}

TEST(CertificateJson, CarriesOptimaAndWitnesses) {
  auto cert = verify_correspondence(random_tlsg(2, 2, 1));
  auto j = nlohmann::json::parse(certificate_to_json(cert));
  EXPECT_EQ(j["passed"].get<bool>(), cert.passed);
  EXPECT_DOUBLE_EQ(j["min_energy"].get<double>(), cert.min_energy);
  EXPECT_EQ(j["tlsg_witness"].size(), 8u);
}

TEST(TextFiles, WriteReadAndFailure) {
  auto path = std::filesystem::temp_directory_path() / "signet_serialization_test.txt";
  write_text_file(path.string(), "alpha\nbeta\n");
  EXPECT_EQ(read_text_file(path.string()), "alpha\nbeta\n");
  std::filesystem::remove(path);
  EXPECT_THROW(read_text_file(path.string()), Error);
  EXPECT_THROW(write_text_file("/nonexistent-dir/x/y.txt", "z"), Error);
}

}  // namespace
}  // namespace signet
