#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "signet/graph.hpp"
#include "signet/inference.hpp"
#include "signet/learning.hpp"
#include "signet/sentiment.hpp"

namespace signet {

struct ScoredEdge {
  EdgeIndex edge = 0;
  double score = 0.0;          // predicted probability of a positive sign
  std::optional<bool> truth;   // absent when the sign is unknown
};

/// Mann-Whitney statistic; ties count 1/2. Throws unless both classes occur.
double auc_roc(std::span<const ScoredEdge> scored);

/// Area under the precision-recall curve of the negative class ranked by
/// 1 - score. Thresholds are taken between tied groups and the area is the
/// trapezoid rule from (0, first precision). Throws without negatives.
double auc_neg_pr(std::span<const ScoredEdge> scored);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

/// (false positive rate, true positive rate), starting at (0,0).
std::vector<CurvePoint> roc_curve(std::span<const ScoredEdge> scored);
/// (recall, precision) of the negative class, starting at (0, first precision).
std::vector<CurvePoint> neg_pr_curve(std::span<const ScoredEdge> scored);

/// CSV `curve,x,y` with curve in {roc, neg_pr}.
void write_curves_csv(std::ostream& out, std::span<const ScoredEdge> scored);

struct InferenceOptions {
  bool squared = true;
  SolverOptions solver;
};

struct Prediction {
  std::vector<ScoredEdge> scored;
  bool converged = true;
  std::size_t iterations = 0;
};

/// p_e for every pool edge (targets and evidence alike), so the output does
/// not depend on how much of the pool is revealed. Throws on a missing p.
std::vector<ScoredEdge> predict_sentiment_only(const SignedGraph& graph,
                                               const EvidencePartition& partition,
                                               std::span<const std::optional<double>> p);

/// MAP scores of the targets with every edge cost removed.
Prediction predict_network_only(const SignedGraph& graph, const EvidencePartition& partition,
                                const CostWeights& weights, const InferenceOptions& options = {});

/// MAP scores of the targets under the full objective.
Prediction predict_combined(const SignedGraph& graph, const EvidencePartition& partition,
                            std::span<const std::optional<double>> p, const CostWeights& weights,
                            const InferenceOptions& options = {});

inline constexpr std::size_t kLooFeatureCount = 20;

/// 16 wedge-type counts, index dir_a*8 + sign_a*4 + dir_b*2 + sign_b, where a
/// joins the source to the third node w, b joins the target to w, dir is 1
/// when the edge points at w and sign is 1 when positive. Then the source's
/// positive and negative out-links and the target's positive and negative
/// in-links. Undirected graphs use dir = 0 throughout and count all incident
/// edges as links. Edges with unknown signs are skipped; `e` itself is never
/// counted.
std::array<double, kLooFeatureCount> loo_features(const SignedGraph& graph, EdgeIndex e);

struct FoldResult {
  std::string model;
  double param = 0.0;  // evidence ratio or dropped feature count
  std::size_t fold = 0;
  double auc_roc = 0.0;
  double auc_neg_pr = 0.0;
};

struct SweepReport {
  std::string model;
  double param = 0.0;
  std::size_t folds = 0;
  double auc_roc_mean = 0.0;
  double auc_roc_se = 0.0;
  double auc_neg_pr_mean = 0.0;
  double auc_neg_pr_se = 0.0;
};

/// Groups by (model, param) in order of first appearance; standard errors
/// use the sample standard deviation and are 0 for a single fold.
std::vector<SweepReport> summarize(std::span<const FoldResult> folds);

struct LooOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  LogregOptions logreg;
};

struct SweepResult {
  std::vector<FoldResult> folds;
  std::vector<SweepReport> summary;
  std::vector<std::string> warnings;
};

/// Cross-validated logistic regression on loo_features (plus p_e when
/// `p` is given). Folds whose training or test part is single-class are
/// skipped with a warning.
SweepResult loo_train_eval(const SignedGraph& graph, std::span<const std::optional<double>> p,
                           const LooOptions& options);

enum class SamplingMode { Bfs, Random };

struct SweepConfig {
  SamplingMode mode = SamplingMode::Random;
  std::size_t samples = 5;        // BFS subgraphs or random edge folds
  std::size_t bfs_budget = 350;
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::string> models{"sentiment", "network", "combined"};
  LearnConfig learn;
  InferenceOptions inference;
  unsigned threads = 1;
};

/// For every seed and fold: train on sample i, test on sample i+1 (mod k),
/// learn weights at each evidence ratio and score the test targets.
SweepResult run_evidence_sweep(const SignedGraph& graph, std::span<const double> ratios,
                               const SweepConfig& config);

/// For each m: drop the top-m features by mutual information, retrain the
/// sentiment model, re-score every edge's text and rerun the sweep at
/// `fixed_ratio`. The FoldResult param is m.
SweepResult run_feature_drop_sweep(const SignedGraph& graph,
                                   std::span<const LabeledDocument> corpus,
                                   std::span<const std::size_t> m_values, double fixed_ratio,
                                   const SentimentTrainOptions& sentiment,
                                   const SweepConfig& config);

/// CSV `model,sweep_param,fold,auc_roc,auc_neg_pr`.
void write_fold_csv(std::ostream& out, std::span<const FoldResult> folds);

/// Scored edges as TSV `edge<TAB>source<TAB>target<TAB>score<TAB>truth`.
void write_scores_tsv(std::ostream& out, const SignedGraph& graph,
                      std::span<const ScoredEdge> scored);

}  // namespace signet
