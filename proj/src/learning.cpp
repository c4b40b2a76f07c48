#include "signet/learning.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace signet {

WeightVector to_vector(const CostWeights& weights) {
  WeightVector w{};
  for (int b = 0; b < kBins; ++b) {
    w[kLambda1Offset + b] = weights.lambda1[b];
    w[kLambda0Offset + b] = weights.lambda0[b];
  }
  for (int c = 0; c < kTriangleClasses; ++c) w[kTriangleOffset + c] = weights.triangle_cost[c];
  w[kPriorOffset] = weights.prior_weight;
  return w;
}

CostWeights from_vector(const WeightVector& w, double prior) {
  CostWeights out;
  for (int b = 0; b < kBins; ++b) {
    out.lambda1[b] = w[kLambda1Offset + b];
    out.lambda0[b] = w[kLambda0Offset + b];
  }
  for (int c = 0; c < kTriangleClasses; ++c) out.triangle_cost[c] = w[kTriangleOffset + c];
  out.prior_weight = w[kPriorOffset];
  out.prior = prior;
  return out;
}

WeightVector FeatureCounts::total() const {
  WeightVector t{};
  for (std::size_t k = 0; k < kWeightCount; ++k) t[k] = free[k] + constant[k];
  return t;
}

double FeatureCounts::dot(const CostWeights& weights) const {
  auto w = to_vector(weights);
  auto t = total();
  double s = 0.0;
  for (std::size_t k = 0; k < kWeightCount; ++k) s += w[k] * t[k];
  return s;
}

FeatureCounts feature_counts(const SignedGraph& graph, const ProblemLayout& layout,
                             std::span<const std::optional<double>> p, std::span<const double> x,
                             double prior, bool squared) {
  if (layout.roles.size() != graph.edge_count()) throw Error("layout does not match graph");
  if (x.size() != layout.variable_count()) throw Error("assignment size mismatch");
  if (p.size() != graph.edge_count()) throw Error("probability vector size mismatch");
  FeatureCounts phi;
  for (std::size_t v = 0; v < layout.free_edges.size(); ++v) {
    EdgeIndex e = layout.free_edges[v];
    if (p[e]) {
      auto b = static_cast<std::size_t>(bin_index(*p[e]) - 1);
      phi.free[kLambda1Offset + b] += std::max(0.0, x[v] - *p[e]);
      phi.free[kLambda0Offset + b] += std::max(0.0, *p[e] - x[v]);
    }
    phi.free[kPriorOffset] += std::abs(x[v] - prior);
  }
  const auto& tris = graph.triangles();
  for (std::size_t t : layout.triangles) {
    std::array<double, 3> xt{};
    bool touches_free = false;
    for (int i = 0; i < 3; ++i) {
      EdgeIndex e = tris[t].edges[i];
      touches_free = touches_free || layout.roles[e] == EdgeRole::Free;
      xt[i] = edge_value(layout, x, e);
    }
    auto& target = touches_free ? phi.free : phi.constant;
    for (unsigned bits = 0; bits < 8; ++bits) {
      auto z = config_from_bits(bits);
      target[kTriangleOffset + static_cast<std::size_t>(triangle_class(z))] +=
          indicator_surrogate(xt, z, squared);
    }
  }
  return phi;
}

FeatureCounts feature_counts(const SignedGraph& graph, const EvidencePartition& partition,
                             std::span<const std::optional<double>> p, std::span<const double> x,
                             double prior, bool squared) {
  return feature_counts(graph, make_layout(graph, partition), p, x, prior, squared);
}

WeightVector average_weights(std::span<const WeightVector> snapshots) {
  if (snapshots.empty()) throw Error("no weight snapshots to average");
  WeightVector sum{};
  for (const auto& s : snapshots) {
    for (std::size_t k = 0; k < kWeightCount; ++k) sum[k] += s[k];
  }
  for (auto& v : sum) v /= static_cast<double>(snapshots.size());
  return sum;
}

LearnResult learn_weights(const SignedGraph& graph, const EvidencePartition& partition,
                          std::span<const std::optional<double>> p, const LearnConfig& config) {
  if (config.epochs < 1) throw Error("epochs must be at least 1");
  if (config.step_size < 0.0 || !std::isfinite(config.step_size)) {
    throw Error("step size must be positive");
  }
  if (!(config.step_scale > 0.0) || !std::isfinite(config.step_scale)) {
    throw Error("step scale must be positive");
  }
  if (!(config.init_value >= 0.0) || !std::isfinite(config.init_value)) {
    throw Error("initial weight must be non-negative");
  }
  auto layout = make_layout(graph, partition);
  const std::size_t n = layout.variable_count();

  std::vector<double> truth(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto t = truth_of(graph.edge(layout.free_edges[v]));
    if (!t) throw Error("training edge " + std::to_string(layout.free_edges[v]) + " has no sign");
    truth[v] = *t ? 1.0 : 0.0;
  }

  double prior = 0.5;
  if (config.prior) {
    prior = *config.prior;
  } else {
    std::size_t known = 0, positive = 0;
    for (EdgeIndex e : partition.pool()) {
      if (auto t = truth_of(graph.edge(e))) {
        ++known;
        positive += *t ? 1 : 0;
      }
    }
    if (known > 0) prior = static_cast<double>(positive) / static_cast<double>(known);
  }

  WeightVector w;
  w.fill(config.init_value);
  if (!config.learn_edge_costs) {
    for (int b = 0; b < kBins; ++b) w[kLambda1Offset + b] = w[kLambda0Offset + b] = 0.0;
  }
  const double step = config.step_size > 0.0
                          ? config.step_size
                          : config.step_scale / static_cast<double>(std::max<std::size_t>(1, n));

  BuildOptions build;
  build.squared = config.squared;
  build.use_edge_costs = config.learn_edge_costs;
  const auto phi_truth = feature_counts(graph, layout, p, truth, prior, config.squared).free;

  LearnResult result;
  std::vector<double> previous;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto weights = from_vector(w, prior);
    auto problem = build_problem(graph, layout, p, weights, build);
    auto solved = admm_solve(problem, config.solver,
                             config.warm_start ? std::span<const double>(previous)
                                               : std::span<const double>());
    auto phi_map = feature_counts(graph, layout, p, solved.x, prior, config.squared).free;

    EpochLog entry;
    entry.epoch = epoch;
    entry.converged = solved.converged;
    entry.objective_map = relaxed_objective(graph, layout, solved.x, p, weights, config.squared);
    entry.objective_truth = relaxed_objective(graph, layout, truth, p, weights, config.squared);
    for (std::size_t k = 0; k < kWeightCount; ++k) {
      bool frozen = !config.learn_edge_costs && k < kTriangleOffset;
      if (frozen) continue;
      double updated = std::max(0.0, w[k] + step * (phi_map[k] - phi_truth[k]));
      entry.weight_l1_delta += std::abs(updated - w[k]);
      w[k] = updated;
    }
    result.snapshots.push_back(w);
    result.log.push_back(entry);
    previous = std::move(solved.x);
  }

  bool constant = std::all_of(result.snapshots.begin(), result.snapshots.end(),
                              [&](const WeightVector& s) { return s == result.snapshots.front(); });
  // Summing identical snapshots can drift by an ulp; a fixed point stays exact.
  result.weights = from_vector(constant ? result.snapshots.front()
                                        : average_weights(result.snapshots),
                               prior);
  return result;
}

std::array<double, kBins> normalized_edge_cost_report(const CostWeights& weights) {
  weights.validate();
  double total = weights.prior_weight;
  for (int b = 0; b < kBins; ++b) total += weights.lambda1[b] + weights.lambda0[b];
  // Each class is shared by C(3, c) of the eight configurations.
  static constexpr double kMultiplicity[kTriangleClasses] = {1.0, 3.0, 3.0, 1.0};
  for (int c = 0; c < kTriangleClasses; ++c) total += kMultiplicity[c] * weights.triangle_cost[c];
  if (!(total > 0.0)) throw Error("normalized cost report needs a positive weight");
  std::array<double, kBins> out{};
  for (int b = 0; b < kBins; ++b) out[b] = (weights.lambda1[b] + weights.lambda0[b]) / total;
  return out;
}

void write_training_log_csv(std::ostream& out, std::span<const EpochLog> log) {
  out << "epoch,objective_map,objective_truth,weight_l1_delta\n";
  auto old = out.precision(12);
  for (const auto& e : log) {
    out << e.epoch << ',' << e.objective_map << ',' << e.objective_truth << ','
        << e.weight_l1_delta << '\n';
  }
  out.precision(old);
}

}  // namespace signet
