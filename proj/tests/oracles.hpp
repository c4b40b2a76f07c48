#pragma once

// Slow reference implementations used only as test oracles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "signet/evaluation.hpp"
#include "signet/graph.hpp"

namespace signet::oracle {

// Every node triple whose three pairs are all edges.
inline std::vector<Triangle> triple_triangles(const SignedGraph& g) {
  std::vector<Triangle> out;
  const auto n = static_cast<NodeId>(g.node_count());
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      auto ab = g.find_edge(a, b);
      if (!ab) continue;
      for (NodeId c = b + 1; c < n; ++c) {
        auto ac = g.find_edge(a, c);
        auto bc = g.find_edge(b, c);
        if (!ac || !bc) continue;
        Triangle t{{*ab, *ac, *bc}};
        std::sort(t.edges.begin(), t.edges.end());
        out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// P(score of random positive > score of random negative), ties 1/2, by
// comparing every pair.
inline double pairwise_auc(const std::vector<ScoredEdge>& s) {
  double wins = 0.0, pairs = 0.0;
  for (const auto& a : s) {
    if (!*a.truth) continue;
    for (const auto& b : s) {
      if (*b.truth) continue;
      pairs += 1.0;
      if (a.score > b.score) wins += 1.0;
      else if (a.score == b.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Negative-class PR area: for each distinct threshold t of 1 - score, count
// the examples at or above t, then apply the trapezoid rule starting at
// (0, precision of the highest threshold).
inline double pairwise_neg_pr(const std::vector<ScoredEdge>& s) {
  std::vector<double> thresholds;
  for (const auto& e : s) thresholds.push_back(1.0 - e.score);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double negatives = 0.0;
  for (const auto& e : s) negatives += *e.truth ? 0.0 : 1.0;
  double area = 0.0, prev_r = 0.0, prev_p = -1.0;
  for (double t : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (const auto& e : s) {
      if (1.0 - e.score >= t) (*e.truth ? fp : tp) += 1.0;
    }
    double r = tp / negatives, p = tp / (tp + fp);
    if (prev_p < 0.0) prev_p = p;
    area += (r - prev_r) * (p + prev_p) / 2.0;
    prev_r = r;
    prev_p = p;
  }
  return area;
}

// Minimizer of a unimodal f on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             int iterations = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < iterations; ++i) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return (a + b) / 2.0;
}

}  // namespace signet::oracle
