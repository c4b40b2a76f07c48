#include "signet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <ostream>

namespace signet {

double HingePotential::linear_part(std::span<const double> x) const {
  double v = offset;
  for (std::uint8_t i = 0; i < arity; ++i) v += coeffs[i] * x[static_cast<std::size_t>(vars[i])];
  return v;
}

double HingePotential::value(std::span<const double> x) const {
  double h = std::max(0.0, linear_part(x));
  return weight * (squared ? h * h : h);
}

double HlMrfProblem::objective(std::span<const double> x) const {
  if (x.size() != variable_count) throw Error("assignment size mismatch");
  double total = constant;
  for (const auto& pot : potentials) total += pot.value(x);
  return total;
}

namespace {

// Largest value of offset + coeffs . x over the unit box.
double box_max(const HingePotential& pot) {
  double v = pot.offset;
  for (std::uint8_t i = 0; i < pot.arity; ++i) v += std::max(0.0, pot.coeffs[i]);
  return v;
}

class ProblemBuilder {
 public:
  explicit ProblemBuilder(HlMrfProblem& problem) : problem_(problem) {}

  // Adds weight * |offset + sum coeff_i x_{var_i}|_+^(1 or 2).
  void add(double weight, std::span<const std::pair<std::int32_t, double>> terms,
           double offset, bool squared) {
    if (weight == 0.0) return;
    HingePotential pot;
    pot.weight = weight;
    pot.offset = offset;
    pot.squared = squared;
    for (const auto& [var, coeff] : terms) {
      pot.vars[pot.arity] = var;
      pot.coeffs[pot.arity] = coeff;
      ++pot.arity;
    }
    if (box_max(pot) <= 0.0) return;
    if (pot.arity == 0) {
      double h = pot.offset;
      problem_.constant += weight * (squared ? h * h : h);
      return;
    }
    problem_.potentials.push_back(pot);
  }

 private:
  HlMrfProblem& problem_;
};

}  // namespace

HlMrfProblem build_problem(const SignedGraph& graph, const ProblemLayout& layout,
                           std::span<const std::optional<double>> p,
                           const CostWeights& weights, const BuildOptions& options) {
  weights.validate();
  if (p.size() != graph.edge_count()) throw Error("probability vector size mismatch");
  if (layout.roles.size() != graph.edge_count()) throw Error("layout does not match graph");

  HlMrfProblem problem;
  problem.variable_count = layout.variable_count();
  problem.variable_edges = layout.free_edges;
  problem.initial.assign(problem.variable_count, weights.prior);
  ProblemBuilder builder(problem);

  for (std::size_t v = 0; v < layout.free_edges.size(); ++v) {
    auto var = static_cast<std::int32_t>(v);
    EdgeIndex e = layout.free_edges[v];
    if (options.use_edge_costs && p[e]) {
      int b = bin_index(*p[e]) - 1;
      const std::pair<std::int32_t, double> up[] = {{var, 1.0}};
      const std::pair<std::int32_t, double> down[] = {{var, -1.0}};
      builder.add(weights.lambda1[b], up, -*p[e], false);
      builder.add(weights.lambda0[b], down, *p[e], false);
      if (weights.lambda1[b] > 0.0 || weights.lambda0[b] > 0.0) problem.initial[v] = *p[e];
    }
    const std::pair<std::int32_t, double> up[] = {{var, 1.0}};
    const std::pair<std::int32_t, double> down[] = {{var, -1.0}};
    builder.add(weights.prior_weight, up, -weights.prior, false);
    builder.add(weights.prior_weight, down, weights.prior, false);
  }

  const auto& tris = graph.triangles();
  for (std::size_t t : layout.triangles) {
    const auto& tri = tris[t];
    for (unsigned bits = 0; bits < 8; ++bits) {
      auto z = config_from_bits(bits);
      double d = weights.triangle_cost[triangle_class(z)];
      if (d == 0.0) continue;
      // 1 - ||x - z||_1 = 1 - #{z_i = 1} + sum_{z_i=1} x_i - sum_{z_i=0} x_i
      double offset = 1.0;
      std::pair<std::int32_t, double> terms[3];
      std::size_t n = 0;
      for (int i = 0; i < 3; ++i) {
        EdgeIndex e = tri.edges[i];
        double sign = z[i] ? 1.0 : -1.0;
        if (z[i]) offset -= 1.0;
        if (layout.roles[e] == EdgeRole::Free) {
          terms[n++] = {static_cast<std::int32_t>(layout.variable_of[e]), sign};
        } else {
          offset += sign * (layout.roles[e] == EdgeRole::FixedPositive ? 1.0 : 0.0);
        }
      }
      builder.add(d, std::span(terms, n), offset, options.squared);
    }
  }
  return problem;
}

HlMrfProblem build_problem(const SignedGraph& graph, const EvidencePartition& partition,
                           std::span<const std::optional<double>> p,
                           const CostWeights& weights, const BuildOptions& options) {
  return build_problem(graph, make_layout(graph, partition), p, weights, options);
}

std::array<double, 3> prox_step(const HingePotential& pot, const std::array<double, 3>& consensus,
                                const std::array<double, 3>& dual, double rho) {
  std::array<double, 3> y{};
  for (std::uint8_t i = 0; i < pot.arity; ++i) y[i] = consensus[i] - dual[i];
  if (pot.weight == 0.0) return y;
  double lin = pot.offset;
  double norm2 = 0.0;
  for (std::uint8_t i = 0; i < pot.arity; ++i) {
    lin += pot.coeffs[i] * y[i];
    norm2 += pot.coeffs[i] * pot.coeffs[i];
  }
  if (lin <= 0.0 || norm2 == 0.0) return y;
  double step;
  if (pot.squared) {
    double s = lin / (1.0 + 2.0 * pot.weight * norm2 / rho);
    step = 2.0 * pot.weight * s / rho;
  } else {
    step = pot.weight / rho;
    // Full gradient step overshoots the kink: stop on the hinge boundary.
    if (lin - step * norm2 < 0.0) step = lin / norm2;
  }
  for (std::uint8_t i = 0; i < pot.arity; ++i) y[i] -= step * pot.coeffs[i];
  return y;
}

SolverResult admm_solve(const HlMrfProblem& problem, const SolverOptions& options,
                        std::span<const double> warm_start) {
  if (!(options.rho > 0.0)) throw Error("rho must be positive");
  const std::size_t n = problem.variable_count;
  const auto& pots = problem.potentials;

  std::vector<double> z(n);
  if (!warm_start.empty()) {
    if (warm_start.size() != n) throw Error("warm start size mismatch");
    std::copy(warm_start.begin(), warm_start.end(), z.begin());
  } else if (problem.initial.size() == n) {
    z = problem.initial;
  } else {
    std::fill(z.begin(), z.end(), 0.5);
  }
  for (auto& v : z) v = std::clamp(v, 0.0, 1.0);

  std::vector<std::size_t> copies(n, 0);
  std::size_t total_copies = 0;
  for (const auto& pot : pots) {
    for (std::uint8_t i = 0; i < pot.arity; ++i) ++copies[static_cast<std::size_t>(pot.vars[i])];
    total_copies += pot.arity;
  }

  std::vector<std::array<double, 3>> local(pots.size()), dual(pots.size());
  for (auto& u : dual) u.fill(0.0);
  std::vector<double> sum(n), z_old(n);
  const double rho = options.rho;
  const double sqrt_m = std::sqrt(static_cast<double>(total_copies));

  SolverResult result;
  if (pots.empty()) {
    result.x = z;
    result.objective = problem.objective(z);
    result.converged = true;
    return result;
  }

  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    for (std::size_t j = 0; j < pots.size(); ++j) {
      const auto& pot = pots[j];
      std::array<double, 3> cons{};
      for (std::uint8_t i = 0; i < pot.arity; ++i) cons[i] = z[static_cast<std::size_t>(pot.vars[i])];
      local[j] = prox_step(pot, cons, dual[j], rho);
    }

    z_old = z;
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < pots.size(); ++j) {
      const auto& pot = pots[j];
      for (std::uint8_t i = 0; i < pot.arity; ++i) {
        sum[static_cast<std::size_t>(pot.vars[i])] += local[j][i] + dual[j][i];
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (copies[v] > 0) z[v] = std::clamp(sum[v] / static_cast<double>(copies[v]), 0.0, 1.0);
    }

    double primal2 = 0.0, local2 = 0.0, cons2 = 0.0, dual2 = 0.0, change2 = 0.0;
    for (std::size_t j = 0; j < pots.size(); ++j) {
      const auto& pot = pots[j];
      for (std::uint8_t i = 0; i < pot.arity; ++i) {
        auto v = static_cast<std::size_t>(pot.vars[i]);
        double diff = local[j][i] - z[v];
        dual[j][i] += diff;
        primal2 += diff * diff;
        local2 += local[j][i] * local[j][i];
        cons2 += z[v] * z[v];
        dual2 += dual[j][i] * dual[j][i];
        double dz = z[v] - z_old[v];
        change2 += dz * dz;
      }
    }
    double primal = std::sqrt(primal2);
    double dual_res = rho * std::sqrt(change2);
    double eps_pri = sqrt_m * options.eps_abs +
                     options.eps_rel * std::max(std::sqrt(local2), std::sqrt(cons2));
    double eps_dual = sqrt_m * options.eps_abs + options.eps_rel * rho * std::sqrt(dual2);

    result.iterations = iter;
    result.primal_residual = primal;
    result.dual_residual = dual_res;
    if (options.record_trace) {
      result.trace.push_back({iter, problem.objective(z), primal, dual_res});
    }
    if (primal <= eps_pri && dual_res <= eps_dual) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(z);
  result.objective = problem.objective(result.x);
  return result;
}

BinaryAssignment round_solution(std::span<const double> x, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("threshold must lie in (0,1)");
  BinaryAssignment out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] >= threshold ? 1 : 0;
  return out;
}

BruteForceResult brute_force_binary(const SignedGraph& graph, const ProblemLayout& layout,
                                    std::span<const std::optional<double>> p,
                                    const CostWeights& weights) {
  const std::size_t n = layout.variable_count();
  if (n > kMaxBruteForceUnknowns) {
    throw Error("brute force limited to " + std::to_string(kMaxBruteForceUnknowns) +
                " unknown edges, got " + std::to_string(n));
  }
  BruteForceResult best;
  best.objective = std::numeric_limits<double>::infinity();
  BinaryAssignment x(n, 0);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    // Variable 0 is the most significant bit, so masks ascend lexicographically.
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1u);
    double obj = exact_objective(graph, layout, x, p, weights);
    if (obj < best.objective) {
      best.objective = obj;
      best.x = x;
    }
  }
  return best;
}

BruteForceResult brute_force_binary(const SignedGraph& graph, const EvidencePartition& partition,
                                    std::span<const std::optional<double>> p,
                                    const CostWeights& weights) {
  return brute_force_binary(graph, make_layout(graph, partition), p, weights);
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
  out << "iter,objective,primal_residual,dual_residual\n";
  auto old = out.precision(12);
  for (const auto& t : trace) {
    out << t.iteration << ',' << t.objective << ',' << t.primal_residual << ','
        << t.dual_residual << '\n';
  }
  out.precision(old);
}

}  // namespace signet
