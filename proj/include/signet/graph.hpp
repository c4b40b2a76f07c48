#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace signet {

using NodeId = std::uint32_t;
using EdgeIndex = std::size_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class SignState : std::uint8_t { Unknown, ObservedPositive, ObservedNegative };

inline bool is_observed(SignState s) { return s != SignState::Unknown; }
inline SignState sign_from_bool(bool positive) {
  return positive ? SignState::ObservedPositive : SignState::ObservedNegative;
}

struct SignedEdge {
  NodeId source = 0;
  NodeId target = 0;
  SignState sign = SignState::Unknown;
  std::optional<double> p;  // sentiment probability of a positive sign
  std::string text;
};

/// Three edges forming a cycle over three distinct nodes. Edge indices are
/// sorted ascending.
struct Triangle {
  std::array<EdgeIndex, 3> edges{};
  friend bool operator==(const Triangle&, const Triangle&) = default;
  friend auto operator<=>(const Triangle&, const Triangle&) = default;
};

/// Immutable signed graph. Cycle detection and pair lookups treat edges as
/// undirected; at most one edge may connect any unordered node pair.
class SignedGraph {
 public:
  SignedGraph();
  /// Throws signet::Error on self-loops, out-of-range endpoints, p outside
  /// [0,1], or more than one edge between the same pair of nodes.
  SignedGraph(std::size_t node_count, bool directed, std::vector<SignedEdge> edges,
              std::vector<std::string> labels = {});

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool directed() const { return directed_; }
  const std::vector<SignedEdge>& edges() const { return edges_; }
  const SignedEdge& edge(EdgeIndex e) const { return edges_.at(e); }

  /// Node labels from the input file; empty when nodes are plain indices.
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(NodeId v) const;

  struct Incidence {
    NodeId neighbor;
    EdgeIndex edge;
  };
  /// Undirected adjacency of `v`, sorted by neighbor id.
  std::span<const Incidence> incident(NodeId v) const;
  std::optional<EdgeIndex> find_edge(NodeId u, NodeId v) const;

  /// Triangle index, built on first use. Thread-safe.
  const std::vector<Triangle>& triangles() const;

 private:
  struct TriangleCache;

  std::size_t node_count_ = 0;
  bool directed_ = false;
  std::vector<SignedEdge> edges_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<Incidence> adjacency_;
  std::shared_ptr<TriangleCache> triangle_cache_;
};

/// Reads the edge-list TSV format:
///   # directed=<true|false>
///   [# nodes=<n>]
///   src<TAB>dst<TAB>sign<TAB>p[<TAB>text]
/// Node names are densely re-mapped in order of first appearance (after
/// `0..n-1` when a nodes line is present). Later duplicates of an edge
/// replace earlier ones.
SignedGraph parse_edge_list(std::istream& in);
SignedGraph read_edge_list(const std::string& path);
void write_edge_list(std::ostream& out, const SignedGraph& graph);
void write_edge_list(const std::string& path, const SignedGraph& graph);

std::string escape_text(const std::string& raw);
std::string unescape_text(const std::string& escaped);

/// Every 3-edge cycle exactly once, edges treated as undirected.
std::vector<Triangle> enumerate_triangles(const SignedGraph& graph);

std::vector<std::optional<double>> edge_probabilities(const SignedGraph& graph);
SignedGraph with_probabilities(const SignedGraph& graph,
                               std::span<const std::optional<double>> p);
/// Ground truth per edge; nullopt for Unknown signs.
std::optional<bool> truth_of(const SignedEdge& edge);

/// Subgraph sharing its parent's node-id space.
struct Subgraph {
  SignedGraph graph;
  std::vector<NodeId> nodes;             // member nodes (BFS order for samples)
  std::vector<EdgeIndex> parent_edges;   // parent edge of each subgraph edge
};

/// Subgraph induced on the first `node_budget` nodes reached by a BFS from
/// `seed` over in- and out-links. The seed counts toward the budget. Each
/// adjacency list is shuffled with `rng_seed` before expansion.
Subgraph bfs_sample(const SignedGraph& graph, NodeId seed, std::size_t node_budget,
                    std::uint64_t rng_seed);

/// Subgraph keeping exactly the given parent edges, in ascending index order.
Subgraph edge_subgraph(const SignedGraph& graph, std::span<const EdgeIndex> edges);

/// Random partition of all edge indices into `folds` disjoint sets whose sizes
/// differ by at most one. Each fold is sorted.
std::vector<std::vector<EdgeIndex>> random_edge_partition(const SignedGraph& graph,
                                                          std::size_t folds,
                                                          std::uint64_t rng_seed);

struct EvidencePartition {
  std::vector<EdgeIndex> train_edges;
  std::vector<EdgeIndex> test_edges;
  std::vector<EdgeIndex> evidence;  // edges whose sign is revealed

  /// (train ∪ test) \ evidence, sorted.
  std::vector<EdgeIndex> targets() const;
  /// train ∪ test, sorted.
  std::vector<EdgeIndex> pool() const;
};

enum class PoolRole { Train, Test };

/// Reveals round(evidence_ratio * |pool|) pool edges chosen uniformly without
/// replacement. The pool is recorded as the partition's train or test set.
EvidencePartition apply_evidence_mask(const SignedGraph& graph,
                                      std::span<const EdgeIndex> edge_pool,
                                      double evidence_ratio, std::uint64_t rng_seed,
                                      PoolRole role = PoolRole::Test);

/// Whole graph as the pool, masked at `evidence_ratio`.
EvidencePartition mask_all_edges(const SignedGraph& graph, double evidence_ratio,
                                 std::uint64_t rng_seed, PoolRole role = PoolRole::Test);

/// Partition whose evidence is exactly the edges with an observed sign and
/// whose targets are the Unknown edges.
EvidencePartition partition_from_observed(const SignedGraph& graph);

/// `test_graph` without the edges that also appear in `train_graph`
/// (same endpoints; orientation matters only for directed graphs).
SignedGraph remove_overlap(const SignedGraph& test_graph, const SignedGraph& train_graph);

struct SyntheticParams {
  std::size_t nodes = 300;
  double edge_prob = 0.1;
  double camp_flip_noise = 0.05;
  double sentiment_noise = 0.5;
  bool directed = false;
};

/// Planted two-camp graph: edges are positive within a camp and negative
/// across, each sign then flipped with probability camp_flip_noise. p is drawn
/// from Beta(5,2) for positive and Beta(2,5) for negative edges, mixed with
/// Uniform(0,1) at weight sentiment_noise.
SignedGraph generate_synthetic(const SyntheticParams& params, std::uint64_t rng_seed);

}  // namespace signet
