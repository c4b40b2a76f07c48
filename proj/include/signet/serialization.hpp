#pragma once

#include <span>
#include <string>

#include "signet/evaluation.hpp"
#include "signet/potentials.hpp"
#include "signet/reduction.hpp"
#include "signet/sentiment.hpp"

namespace signet {

/// {"lambda1": [10], "lambda0": [10], "d": [4], "prior_weight": w, "prior": pi}
std::string weights_to_json(const CostWeights& weights);
CostWeights weights_from_json(const std::string& text);

/// Vocabulary, weights, bias, l2 and the training metadata.
std::string sentiment_model_to_json(const SentimentModel& model);
SentimentModel sentiment_model_from_json(const std::string& text);

/// Aggregated sweep rows with means and standard errors.
std::string sweep_summary_json(std::span<const SweepReport> summary);

std::string certificate_to_json(const Certificate& cert);

std::string read_text_file(const std::string& path);
/// Writes the whole string; throws signet::Error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace signet
