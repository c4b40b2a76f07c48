#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "signet/graph.hpp"

namespace signet {

using SparseVector = Eigen::SparseVector<double>;
using FeatureMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Lowercased runs of ASCII alphanumerics.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws on duplicate terms.
  explicit Vocabulary(std::vector<std::string> terms);

  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  std::optional<std::size_t> find(const std::string& term) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Most frequent tokens of the corpus (ties broken lexicographically),
/// skipping any token that starts with a banned prefix.
Vocabulary build_vocabulary(std::span<const std::string> corpus, std::size_t max_features,
                            std::span<const std::string> banned_prefixes);

/// Raw term counts; out-of-vocabulary tokens are ignored.
SparseVector featurize(std::string_view text, const Vocabulary& vocab);
FeatureMatrix featurize_corpus(std::span<const std::string> documents, const Vocabulary& vocab);

/// Binary logistic regression with an L2 penalty on the weights (not the bias).
struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double l2 = 1.0;

  double logit(const SparseVector& x) const;
  double predict(const SparseVector& x) const;
};

struct LogregOptions {
  std::vector<double> l2_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  std::size_t cv_folds = 5;
  std::uint64_t seed = 0;
  double gradient_tolerance = 1e-9;
  std::size_t max_newton_iterations = 200;
};

/// Minimizes mean log-loss + l2/2 * ||w||^2 by truncated Newton.
LogisticModel fit_logreg(const FeatureMatrix& features, std::span<const int> labels, double l2,
                         const LogregOptions& options = {});

/// Gradient of the fitted objective at the model (weights then bias).
Eigen::VectorXd logreg_gradient(const FeatureMatrix& features, std::span<const int> labels,
                                const LogisticModel& model);

/// Picks the l2 value with the best pooled held-out log-likelihood over
/// cv_folds folds and refits on all rows. Identical rows always share a fold.
/// Throws when only one class is present.
LogisticModel train_logreg(const FeatureMatrix& features, std::span<const int> labels,
                           const LogregOptions& options = {});

double logistic(double z);

struct SentimentModel {
  Vocabulary vocab;
  LogisticModel model;
  std::size_t sample_size = 0;  // comments used for training
  std::uint64_t seed = 0;
};

double predict_proba(const SentimentModel& model, std::string_view text);

struct LabeledDocument {
  bool positive = true;
  std::string text;
};

struct SentimentTrainOptions {
  std::size_t sample_size = 1000;
  std::size_t max_features = 10000;
  std::vector<std::string> banned_prefixes{"support", "oppos"};
  LogregOptions logreg;
  std::uint64_t seed = 0;
};

/// Sorted indices of a uniform random sample of `sample_size` rows (all rows
/// when fewer are available).
std::vector<std::size_t> sample_rows(std::size_t row_count, std::size_t sample_size,
                                     std::uint64_t seed);

/// Trains once on a uniform random sample of `sample_size` documents (all of
/// them when fewer are available).
SentimentModel train_sentiment_model(std::span<const LabeledDocument> corpus,
                                     const SentimentTrainOptions& options);

/// Corpus TSV: label<TAB>text with label in {+1,-1,1,0}.
std::vector<LabeledDocument> read_corpus(std::istream& in);

/// Platt map score -> probability: logistic(slope * score + intercept).
struct CalibrationMap {
  double slope = 1.0;
  double intercept = 0.0;
  double operator()(double score) const { return logistic(slope * score + intercept); }
};

/// 1-D logistic fit of labels on scores. With constant scores the map returns
/// the class prior at that score. Throws on single-class labels.
CalibrationMap platt_scale(std::span<const double> raw_scores, std::span<const int> labels);

/// Probability that two independent yes/no votes agree.
double agreement_probability(double q_u, double q_v);

/// Mean agreement over co-voted bills. Throws on empty or unequal inputs.
double edge_agreement(std::span<const double> q_u, std::span<const double> q_v);

struct SpeechScore {
  std::string speaker;
  std::string bill;
  double raw_score = 0.0;
  bool vote_yes = true;
};

/// Per-speech score TSV: speaker<TAB>bill<TAB>raw_score<TAB>vote, vote in
/// {Y,N,+1,-1,1,0}.
std::vector<SpeechScore> read_speech_scores(std::istream& in);

/// Undirected person-person graph: speakers who voted on a common bill are
/// linked; the sign is positive when they voted alike on at least half of
/// their common bills; p is the mean agreement of the calibrated speech
/// probabilities.
SignedGraph build_agreement_graph(std::span<const SpeechScore> speeches,
                                  const CalibrationMap& calibration);

/// Mutual information (bits) between feature presence and the label.
std::vector<double> mutual_information(const FeatureMatrix& features, std::span<const int> labels);

/// Feature indices by decreasing mutual information, ties by index.
std::vector<std::size_t> rank_features_mi(const FeatureMatrix& features,
                                          std::span<const int> labels);

/// Indices kept after dropping the `m` top-ranked features, ascending.
std::vector<std::size_t> drop_top_features(std::size_t feature_count, std::size_t m,
                                           std::span<const std::size_t> ranking);

FeatureMatrix select_columns(const FeatureMatrix& features, std::span<const std::size_t> kept);
Vocabulary restrict_vocabulary(const Vocabulary& vocab, std::span<const std::size_t> kept);

struct SyntheticTextParams {
  std::size_t informative_terms = 40;
  std::size_t neutral_terms = 400;
  double mean_length = 12.0;
  double informative_rate = 0.35;  // share of tokens drawn from informative terms
  double label_word_rate = 0.5;    // chance of an explicit support/oppose word
};

/// Fills each edge's text with a generated comment whose informative terms
/// lean toward the edge's true sign with strength decreasing in term rank.
SignedGraph attach_synthetic_comments(const SignedGraph& graph, const SyntheticTextParams& params,
                                      std::uint64_t rng_seed);

}  // namespace signet
