#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "signet/graph.hpp"

namespace signet {

inline constexpr int kBins = 10;
inline constexpr int kTriangleClasses = 4;

/// Cost parameters of the joint objective. Everything is a non-negative weight
/// except `prior`, the prior probability of a positive sign.
struct CostWeights {
  std::array<double, kBins> lambda1{};  // cost of x above p, per p-bin
  std::array<double, kBins> lambda0{};  // cost of x below p, per p-bin
  std::array<double, kTriangleClasses> triangle_cost{};  // by number of positive edges
  double prior_weight = 0.0;
  double prior = 0.5;

  static CostWeights uniform(double value, double prior = 0.5);
  /// Throws signet::Error on a negative or non-finite weight or a prior outside [0,1].
  void validate() const;
  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

/// 1-based bin of p: [0,0.1), [0.1,0.2), ..., [0.9,1.0].
int bin_index(double p);

double edge_cost_binary(bool x, double p, double lambda1, double lambda0);
/// lambda1*|x-p|_+ + lambda0*|p-x|_+
double edge_cost_relaxed(double x, double p, double lambda1, double lambda0);

using TriangleSigns = std::array<bool, 3>;

int triangle_class(const TriangleSigns& z);

/// |1 - ||x - z||_1|_+, optionally squared. Equals [x == z] at binary x.
double indicator_surrogate(const std::array<double, 3>& x, const TriangleSigns& z, bool squared);

/// The 8 binary configurations, indexed by bit i = coordinate i.
TriangleSigns config_from_bits(unsigned bits);

double triangle_cost_binary(const TriangleSigns& z, const CostWeights& weights);
double triangle_cost_relaxed(const std::array<double, 3>& x, const CostWeights& weights,
                             bool squared);

/// prior_weight * |x - prior|
double prior_cost(double x, const CostWeights& weights);

enum class EdgeRole : std::uint8_t { Excluded, Free, FixedPositive, FixedNegative };

/// How the edges of a graph enter one inference problem: free variables,
/// fixed evidence, or excluded. Only triangles with no excluded edge count.
struct ProblemLayout {
  std::vector<EdgeRole> roles;
  std::vector<EdgeIndex> free_edges;        // variable index -> edge
  std::vector<std::ptrdiff_t> variable_of;  // edge -> variable index or -1
  std::vector<std::size_t> triangles;       // indices into graph.triangles()

  std::size_t variable_count() const { return free_edges.size(); }
};

/// Evidence edges are fixed to their observed sign; the remaining pool edges
/// are free. Throws if an evidence edge has no observed sign.
ProblemLayout make_layout(const SignedGraph& graph, const EvidencePartition& partition);

using BinaryAssignment = std::vector<std::uint8_t>;

/// Value of edge `e` given an assignment of the free variables.
template <typename Assignment>
double edge_value(const ProblemLayout& layout, const Assignment& x, EdgeIndex e) {
  switch (layout.roles[e]) {
    case EdgeRole::Free: return static_cast<double>(x[static_cast<std::size_t>(layout.variable_of[e])]);
    case EdgeRole::FixedPositive: return 1.0;
    case EdgeRole::FixedNegative: return 0.0;
    case EdgeRole::Excluded: break;
  }
  throw Error("edge " + std::to_string(e) + " is not part of the problem");
}

/// Binary objective: edge costs and prior over free edges, plus d over every
/// triangle of the layout. Free edges without p carry no edge cost.
double exact_objective(const SignedGraph& graph, const ProblemLayout& layout,
                       std::span<const std::uint8_t> x,
                       std::span<const std::optional<double>> p, const CostWeights& weights);

/// Hinge-loss relaxation of exact_objective; the triangle hinges are squared
/// when `squared` is set. Coincides with exact_objective at binary x.
double relaxed_objective(const SignedGraph& graph, const ProblemLayout& layout,
                         std::span<const double> x, std::span<const std::optional<double>> p,
                         const CostWeights& weights, bool squared);

}  // namespace signet
