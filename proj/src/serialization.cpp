#include "signet/serialization.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace signet {

using nlohmann::json;

namespace {

template <std::size_t N>
std::array<double, N> read_array(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != N) {
    throw Error(std::string("'") + key + "' must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = v[i].get<double>();
  return out;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string weights_to_json(const CostWeights& weights) {
  json j;
  j["lambda1"] = weights.lambda1;
  j["lambda0"] = weights.lambda0;
  j["d"] = weights.triangle_cost;
  j["prior_weight"] = weights.prior_weight;
  j["prior"] = weights.prior;
  return j.dump(2) + "\n";
}

CostWeights weights_from_json(const std::string& text) {
  auto j = parse(text);
  CostWeights w;
  try {
    w.lambda1 = read_array<kBins>(j, "lambda1");
    w.lambda0 = read_array<kBins>(j, "lambda0");
    w.triangle_cost = read_array<kTriangleClasses>(j, "d");
    w.prior_weight = j.at("prior_weight").get<double>();
    w.prior = j.at("prior").get<double>();
  } catch (const json::exception& e) {
    throw Error(std::string("invalid weights file: ") + e.what());
  }
  w.validate();
  return w;
}

std::string sentiment_model_to_json(const SentimentModel& model) {
  json j;
  j["vocabulary"] = model.vocab.terms();
  j["weights"] = std::vector<double>(model.model.weights.data(),
                                     model.model.weights.data() + model.model.weights.size());
  j["bias"] = model.model.bias;
  j["l2"] = model.model.l2;
  j["sample_size"] = model.sample_size;
  j["seed"] = model.seed;
  return j.dump(2) + "\n";
}

SentimentModel sentiment_model_from_json(const std::string& text) {
  auto j = parse(text);
  SentimentModel m;
  try {
    m.vocab = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != m.vocab.size()) throw Error("model weights do not match the vocabulary");
    m.model.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    m.model.bias = j.at("bias").get<double>();
    m.model.l2 = j.at("l2").get<double>();
    m.sample_size = j.at("sample_size").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(std::string("invalid sentiment model: ") + e.what());
  }
  return m;
}

std::string sweep_summary_json(std::span<const SweepReport> summary) {
  json rows = json::array();
  for (const auto& r : summary) {
    rows.push_back({{"model", r.model},
                    {"sweep_param", r.param},
                    {"folds", r.folds},
                    {"auc_roc_mean", r.auc_roc_mean},
                    {"auc_roc_se", r.auc_roc_se},
                    {"auc_neg_pr_mean", r.auc_neg_pr_mean},
                    {"auc_neg_pr_se", r.auc_neg_pr_se}});
  }
  return rows.dump(2) + "\n";
}

std::string certificate_to_json(const Certificate& cert) {
  json j;
  j["passed"] = cert.passed;
  j["vertex_count"] = cert.vertex_count;
  j["edge_count"] = cert.edge_count;
  j["min_energy"] = cert.min_energy;
  j["min_balance"] = cert.min_balance;
  j["tlsg_witness"] = cert.tlsg_witness;
  j["balance_witness"] = std::vector<int>(cert.balance_witness.begin(), cert.balance_witness.end());
  j["checks"] = {{"structure", cert.structure_ok},
                 {"offset_identity", cert.offset_ok},
                 {"balance_to_tlsg", cert.balance_to_tlsg_ok},
                 {"tlsg_to_balance", cert.tlsg_to_balance_ok}};
  j["failures"] = cert.failures;
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace signet
