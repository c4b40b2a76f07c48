#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "signet/graph.hpp"
#include "signet/potentials.hpp"

namespace signet {

/// weight * |offset + coeffs . x|_+ (squared when `squared` is set) over up to
/// three problem variables.
struct HingePotential {
  double weight = 0.0;
  std::array<std::int32_t, 3> vars{-1, -1, -1};
  std::array<double, 3> coeffs{};
  double offset = 0.0;
  std::uint8_t arity = 0;
  bool squared = false;

  double linear_part(std::span<const double> x) const;
  double value(std::span<const double> x) const;
};

struct HlMrfProblem {
  std::size_t variable_count = 0;
  std::vector<HingePotential> potentials;
  double constant = 0.0;              // contribution of fully fixed triangles
  std::vector<double> initial;        // consensus starting point
  std::vector<EdgeIndex> variable_edges;

  double objective(std::span<const double> x) const;
};

struct BuildOptions {
  bool squared = true;         // square the triangle hinges
  bool use_edge_costs = true;  // false drops every sentiment edge potential
};

/// Emits the edge hinge pair for each free edge with p (bin-selected
/// lambdas), the prior hinge pair, and one hinge per configuration z for each
/// triangle touching a free edge. Zero-weight potentials and hinges that
/// cannot be active on [0,1]^n are omitted.
HlMrfProblem build_problem(const SignedGraph& graph, const ProblemLayout& layout,
                           std::span<const std::optional<double>> p,
                           const CostWeights& weights, const BuildOptions& options = {});
HlMrfProblem build_problem(const SignedGraph& graph, const EvidencePartition& partition,
                           std::span<const std::optional<double>> p,
                           const CostWeights& weights, const BuildOptions& options = {});

struct SolverOptions {
  double rho = 1.0;
  double eps_abs = 1e-5;
  double eps_rel = 1e-4;
  std::size_t max_iter = 20000;
  bool record_trace = false;
};

struct TracePoint {
  std::size_t iteration;
  double objective;
  double primal_residual;
  double dual_residual;
};

struct SolverResult {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

/// Consensus ADMM. Each potential keeps local copies of its variables; the
/// consensus is the box-projected average of copies plus scaled duals.
/// Starts from `warm_start` when given, else from problem.initial.
SolverResult admm_solve(const HlMrfProblem& problem, const SolverOptions& options = {},
                        std::span<const double> warm_start = {});

/// Closed-form minimizer of potential(y) + rho/2 * ||y - (consensus - dual)||^2
/// over the potential's variables.
std::array<double, 3> prox_step(const HingePotential& potential,
                                const std::array<double, 3>& consensus,
                                const std::array<double, 3>& dual, double rho);

/// x >= threshold maps to 1.
BinaryAssignment round_solution(std::span<const double> x, double threshold = 0.5);

struct BruteForceResult {
  BinaryAssignment x;
  double objective = 0.0;
};

inline constexpr std::size_t kMaxBruteForceUnknowns = 22;

/// Exhaustive minimum of exact_objective; ties go to the lexicographically
/// smallest assignment.
BruteForceResult brute_force_binary(const SignedGraph& graph, const ProblemLayout& layout,
                                    std::span<const std::optional<double>> p,
                                    const CostWeights& weights);
BruteForceResult brute_force_binary(const SignedGraph& graph, const EvidencePartition& partition,
                                    std::span<const std::optional<double>> p,
                                    const CostWeights& weights);

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);

}  // namespace signet
