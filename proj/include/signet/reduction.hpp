#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "signet/graph.hpp"
#include "signet/potentials.hpp"

namespace signet {

struct TlsgEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  int cost = 0;  // -1, 0 or +1
};

/// Two stacked width x height grids. Vertex id = level*w*h + y*w + x. Edges
/// follow tlsg_topology order.
struct TlsgInstance {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<TlsgEdge> edges;

  std::size_t vertex_count() const { return 2 * width * height; }
  std::size_t vertex_id(std::size_t level, std::size_t x, std::size_t y) const {
    return level * width * height + y * width + x;
  }
};

/// Grid edges of each level (right then down neighbor, row-major), then the
/// vertical pairs. Every pair has u < v.
std::vector<std::pair<std::size_t, std::size_t>> tlsg_topology(std::size_t width,
                                                               std::size_t height);

/// Instance with the given costs in topology order; throws on a size mismatch
/// or a cost outside {-1,0,+1}.
TlsgInstance make_tlsg(std::size_t width, std::size_t height, std::span<const int> costs);
TlsgInstance random_tlsg(std::size_t width, std::size_t height, std::uint64_t seed);

/// Text format: `w h`, then one `u v c` line per edge in any order. Every
/// topology edge must appear exactly once.
TlsgInstance parse_tlsg(std::istream& in);
TlsgInstance read_tlsg(const std::string& path);
void write_tlsg(std::ostream& out, const TlsgInstance& instance);

/// H(s) = -sum c_uv s_u s_v with spins in {-1,+1}.
double tlsg_energy(const TlsgInstance& instance, std::span<const int> spins);

struct TlsgSolution {
  double energy = 0.0;
  std::vector<int> spins;
};

inline constexpr std::size_t kMaxTlsgBruteForce = 20;

/// Exhaustive minimum; spin vectors are enumerated with vertex 0 most
/// significant and -1 before +1, the first minimum wins.
TlsgSolution brute_force_tlsg(const TlsgInstance& instance);

/// Triangle-balance image of an instance. Edges 0..V-1 join vertex v to the
/// star node V; edge V+k is the k-th instance edge. Each triangle table is
/// indexed by configuration bits over the triangle's sorted edges.
struct ReductionOutput {
  SignedGraph graph;
  NodeId star_vertex = 0;
  std::vector<EdgeIndex> vertex_to_edge;
  std::vector<std::size_t> edge_to_triangle;   // instance edge -> triangle
  std::vector<double> edge_costs;              // all zero
  std::vector<std::array<double, 8>> triangle_tables;
};

ReductionOutput reduce_to_triangle_balance(const TlsgInstance& instance);

/// Sum of edge costs and triangle-table entries for a binary value per edge.
double balance_objective(const ReductionOutput& reduction, std::span<const std::uint8_t> x);

struct BalanceSolution {
  double objective = 0.0;
  BinaryAssignment x;
};

/// Exact minimum. Joint enumeration up to 24 edges; beyond that the star
/// edges are enumerated and each triangle's base edge, which lies in no other
/// triangle, is set to its cheapest value.
BalanceSolution brute_force_balance(const ReductionOutput& reduction);

/// Spin of each instance vertex read off its star edge (1 -> +1, 0 -> -1).
std::vector<int> spins_from_assignment(const ReductionOutput& reduction,
                                       std::span<const std::uint8_t> x);
/// Star edges set from the spins, base edges 0.
BinaryAssignment assignment_from_spins(const ReductionOutput& reduction,
                                       std::span<const int> spins);

struct Certificate {
  bool passed = false;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  double min_energy = 0.0;
  double min_balance = 0.0;
  std::vector<int> tlsg_witness;
  BinaryAssignment balance_witness;
  bool structure_ok = false;        // triangle-free grids, bijections, counts
  bool offset_ok = false;           // min_balance == |E| + min_energy
  bool balance_to_tlsg_ok = false;  // read-off spins are optimal
  bool tlsg_to_balance_ok = false;  // mapped spins are optimal
  std::vector<std::string> failures;
};

inline constexpr std::size_t kMaxCertifiedVertices = 14;

Certificate verify_correspondence(const TlsgInstance& instance);

/// Checks total triangle cost == |E| + H(spins) for every assignment. Every
/// assignment is enumerated when there are at most `max_joint_edges` edges;
/// otherwise each table is first shown to ignore its base edge, which lets
/// the star edges alone be enumerated.
bool check_offset_identity(const TlsgInstance& instance, std::size_t max_joint_edges = 22);

}  // namespace signet
