#include "signet/potentials.hpp"

#include <algorithm>
#include <cmath>

namespace signet {

namespace {

double hinge(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

CostWeights CostWeights::uniform(double value, double prior) {
  CostWeights w;
  w.lambda1.fill(value);
  w.lambda0.fill(value);
  w.triangle_cost.fill(value);
  w.prior_weight = value;
  w.prior = prior;
  return w;
}

void CostWeights::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) throw Error(std::string("invalid weight ") + name);
  };
  for (double v : lambda1) check(v, "lambda1");
  for (double v : lambda0) check(v, "lambda0");
  for (double v : triangle_cost) check(v, "d");
  check(prior_weight, "prior_weight");
  if (!std::isfinite(prior) || prior < 0.0 || prior > 1.0) throw Error("prior outside [0,1]");
}

int bin_index(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("probability outside [0,1]");
  int bin = static_cast<int>(std::floor(p * kBins)) + 1;
  return std::min(bin, kBins);
}

double edge_cost_binary(bool x, double p, double lambda1, double lambda0) {
  return x ? lambda1 * (1.0 - p) : lambda0 * p;
}

double edge_cost_relaxed(double x, double p, double lambda1, double lambda0) {
  return lambda1 * hinge(x - p) + lambda0 * hinge(p - x);
}

int triangle_class(const TriangleSigns& z) {
  return static_cast<int>(z[0]) + static_cast<int>(z[1]) + static_cast<int>(z[2]);
}

TriangleSigns config_from_bits(unsigned bits) {
  return {(bits & 1u) != 0, (bits & 2u) != 0, (bits & 4u) != 0};
}

double indicator_surrogate(const std::array<double, 3>& x, const TriangleSigns& z,
                           bool squared) {
  double dist = 0.0;
  for (int i = 0; i < 3; ++i) dist += z[i] ? 1.0 - x[i] : x[i];
  double h = hinge(1.0 - dist);
  return squared ? h * h : h;
}

double triangle_cost_binary(const TriangleSigns& z, const CostWeights& weights) {
  return weights.triangle_cost[triangle_class(z)];
}

double triangle_cost_relaxed(const std::array<double, 3>& x, const CostWeights& weights,
                             bool squared) {
  double total = 0.0;
  for (unsigned bits = 0; bits < 8; ++bits) {
    auto z = config_from_bits(bits);
    double d = weights.triangle_cost[triangle_class(z)];
    if (d != 0.0) total += d * indicator_surrogate(x, z, squared);
  }
  return total;
}

double prior_cost(double x, const CostWeights& weights) {
  return weights.prior_weight * (hinge(x - weights.prior) + hinge(weights.prior - x));
}

ProblemLayout make_layout(const SignedGraph& graph, const EvidencePartition& partition) {
  ProblemLayout layout;
  layout.roles.assign(graph.edge_count(), EdgeRole::Excluded);
  layout.variable_of.assign(graph.edge_count(), -1);
  for (EdgeIndex e : partition.pool()) {
    if (e >= graph.edge_count()) throw Error("partition edge out of range");
    layout.roles[e] = EdgeRole::Free;
  }
  for (EdgeIndex e : partition.evidence) {
    if (e >= graph.edge_count()) throw Error("evidence edge out of range");
    auto truth = truth_of(graph.edge(e));
    if (!truth) throw Error("evidence edge " + std::to_string(e) + " has no observed sign");
    layout.roles[e] = *truth ? EdgeRole::FixedPositive : EdgeRole::FixedNegative;
  }
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    if (layout.roles[e] == EdgeRole::Free) {
      layout.variable_of[e] = static_cast<std::ptrdiff_t>(layout.free_edges.size());
      layout.free_edges.push_back(e);
    }
  }
  const auto& tris = graph.triangles();
  for (std::size_t t = 0; t < tris.size(); ++t) {
    bool inside = std::none_of(tris[t].edges.begin(), tris[t].edges.end(), [&](EdgeIndex e) {
      return layout.roles[e] == EdgeRole::Excluded;
    });
    if (inside) layout.triangles.push_back(t);
  }
  return layout;
}

namespace {

void check_sizes(const SignedGraph& graph, const ProblemLayout& layout, std::size_t x_size,
                 std::size_t p_size) {
  if (layout.roles.size() != graph.edge_count()) throw Error("layout does not match graph");
  if (x_size != layout.variable_count()) throw Error("assignment size mismatch");
  if (p_size != graph.edge_count()) throw Error("probability vector size mismatch");
}

}  // namespace

double exact_objective(const SignedGraph& graph, const ProblemLayout& layout,
                       std::span<const std::uint8_t> x,
                       std::span<const std::optional<double>> p, const CostWeights& weights) {
  check_sizes(graph, layout, x.size(), p.size());
  double total = 0.0;
  for (std::size_t v = 0; v < layout.free_edges.size(); ++v) {
    if (x[v] > 1) throw Error("assignment is not binary");
    EdgeIndex e = layout.free_edges[v];
    if (p[e]) {
      int b = bin_index(*p[e]) - 1;
      total += edge_cost_binary(x[v] != 0, *p[e], weights.lambda1[b], weights.lambda0[b]);
    }
    total += prior_cost(x[v], weights);
  }
  const auto& tris = graph.triangles();
  for (std::size_t t : layout.triangles) {
    TriangleSigns z{};
    for (int i = 0; i < 3; ++i) z[i] = edge_value(layout, x, tris[t].edges[i]) != 0.0;
    total += triangle_cost_binary(z, weights);
  }
  return total;
}

double relaxed_objective(const SignedGraph& graph, const ProblemLayout& layout,
                         std::span<const double> x, std::span<const std::optional<double>> p,
                         const CostWeights& weights, bool squared) {
  check_sizes(graph, layout, x.size(), p.size());
  double total = 0.0;
  for (std::size_t v = 0; v < layout.free_edges.size(); ++v) {
    EdgeIndex e = layout.free_edges[v];
    if (p[e]) {
      int b = bin_index(*p[e]) - 1;
      total += edge_cost_relaxed(x[v], *p[e], weights.lambda1[b], weights.lambda0[b]);
    }
    total += prior_cost(x[v], weights);
  }
  const auto& tris = graph.triangles();
  for (std::size_t t : layout.triangles) {
    std::array<double, 3> xt{};
    for (int i = 0; i < 3; ++i) xt[i] = edge_value(layout, x, tris[t].edges[i]);
    total += triangle_cost_relaxed(xt, weights, squared);
  }
  return total;
}

}  // namespace signet
