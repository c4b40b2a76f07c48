#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "signet/inference.hpp"
#include "signet/potentials.hpp"

namespace signet {

/// Flat layout of the learnable weights: lambda1[10], lambda0[10], d[4],
/// prior_weight.
inline constexpr std::size_t kWeightCount = 2 * kBins + kTriangleClasses + 1;
inline constexpr std::size_t kLambda1Offset = 0;
inline constexpr std::size_t kLambda0Offset = kBins;
inline constexpr std::size_t kTriangleOffset = 2 * kBins;
inline constexpr std::size_t kPriorOffset = 2 * kBins + kTriangleClasses;

using WeightVector = std::array<double, kWeightCount>;

WeightVector to_vector(const CostWeights& weights);
CostWeights from_vector(const WeightVector& w, double prior);

/// Unweighted hinge mass per weight component. `free` covers every potential
/// that touches a free edge; `constant` holds triangles made only of evidence.
struct FeatureCounts {
  WeightVector free{};
  WeightVector constant{};

  WeightVector total() const;
  /// weights . total()
  double dot(const CostWeights& weights) const;
};

FeatureCounts feature_counts(const SignedGraph& graph, const ProblemLayout& layout,
                             std::span<const std::optional<double>> p, std::span<const double> x,
                             double prior, bool squared = true);
FeatureCounts feature_counts(const SignedGraph& graph, const EvidencePartition& partition,
                             std::span<const std::optional<double>> p, std::span<const double> x,
                             double prior, bool squared = true);

struct LearnConfig {
  std::size_t epochs = 50;
  double step_size = 0.0;             // 0 means step_scale / |target edges|
  double step_scale = 0.1;
  double init_value = 1.0;            // every learnable component starts here
  std::optional<double> prior;        // default: positive fraction of the pool
  bool squared = true;
  bool learn_edge_costs = true;       // false pins every lambda at 0
  bool warm_start = true;             // start each MAP from the previous one
  SolverOptions solver;
};

struct EpochLog {
  std::size_t epoch = 0;
  double objective_map = 0.0;
  double objective_truth = 0.0;
  double weight_l1_delta = 0.0;
  bool converged = true;
};

struct LearnResult {
  CostWeights weights;                   // average of the snapshots
  std::vector<WeightVector> snapshots;   // weights after each epoch
  std::vector<EpochLog> log;
};

/// Averaged perceptron: each epoch solves MAP under the current weights and
/// moves w by step * (phi(MAP) - phi(truth)), clipped at 0.
LearnResult learn_weights(const SignedGraph& graph, const EvidencePartition& partition,
                          std::span<const std::optional<double>> p, const LearnConfig& config);

/// Element-wise mean of the snapshots.
WeightVector average_weights(std::span<const WeightVector> snapshots);

/// Share of the total cost carried by each p-bin's edge costs. The total sums
/// lambda1 and lambda0 over bins, d over all 8 triangle configurations, and
/// the prior weight. Throws when every weight is zero.
std::array<double, kBins> normalized_edge_cost_report(const CostWeights& weights);

void write_training_log_csv(std::ostream& out, std::span<const EpochLog> log);

}  // namespace signet
