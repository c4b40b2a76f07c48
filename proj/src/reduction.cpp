#include "signet/reduction.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "signet/random.hpp"

namespace signet {

std::vector<std::pair<std::size_t, std::size_t>> tlsg_topology(std::size_t width,
                                                               std::size_t height) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t plane = width * height;
  for (std::size_t level = 0; level < 2; ++level) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        std::size_t id = level * plane + y * width + x;
        if (x + 1 < width) out.emplace_back(id, id + 1);
        if (y + 1 < height) out.emplace_back(id, id + width);
      }
    }
  }
  for (std::size_t id = 0; id < plane; ++id) out.emplace_back(id, id + plane);
  return out;
}

TlsgInstance make_tlsg(std::size_t width, std::size_t height, std::span<const int> costs) {
  if (width == 0 || height == 0) throw Error("grid dimensions must be positive");
  auto topo = tlsg_topology(width, height);
  if (costs.size() != topo.size()) {
    throw Error("expected " + std::to_string(topo.size()) + " edge costs, got " +
                std::to_string(costs.size()));
  }
  TlsgInstance inst{width, height, {}};
  for (std::size_t k = 0; k < topo.size(); ++k) {
    if (costs[k] < -1 || costs[k] > 1) throw Error("edge costs must be -1, 0 or +1");
    inst.edges.push_back({topo[k].first, topo[k].second, costs[k]});
  }
  return inst;
}

TlsgInstance random_tlsg(std::size_t width, std::size_t height, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(-1, 1);
  std::vector<int> costs(tlsg_topology(width, height).size());
  for (auto& c : costs) c = pick(rng);
  return make_tlsg(width, height, costs);
}

TlsgInstance parse_tlsg(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError(line_no, "missing 'w h' header");
  long long w = 0, h = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> w >> h) || (hs >> extra) || w <= 0 || h <= 0) {
      throw ParseError(line_no, "header must be two positive integers 'w h'");
    }
  }
  auto topo = tlsg_topology(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
  for (std::size_t k = 0; k < topo.size(); ++k) slot[topo[k]] = k;
  std::vector<int> costs(topo.size(), 0);
  std::vector<char> seen(topo.size(), 0);
  while (next_line()) {
    std::istringstream ls(line);
    long long u = 0, v = 0, c = 0;
    std::string extra;
    if (!(ls >> u >> v >> c) || (ls >> extra)) throw ParseError(line_no, "expected 'u v c'");
    if (u < 0 || v < 0) throw ParseError(line_no, "negative vertex id");
    if (c < -1 || c > 1) throw ParseError(line_no, "cost must be -1, 0 or +1");
    auto a = static_cast<std::size_t>(u), b = static_cast<std::size_t>(v);
    auto it = slot.find({std::min(a, b), std::max(a, b)});
    if (it == slot.end()) throw ParseError(line_no, "pair is not a grid edge");
    if (seen[it->second]) throw ParseError(line_no, "duplicate edge");
    seen[it->second] = 1;
    costs[it->second] = static_cast<int>(c);
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ParseError(line_no, "instance is missing grid edges");
  }
  return make_tlsg(static_cast<std::size_t>(w), static_cast<std::size_t>(h), costs);
}

TlsgInstance read_tlsg(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_tlsg(in);
}

void write_tlsg(std::ostream& out, const TlsgInstance& instance) {
  out << instance.width << ' ' << instance.height << '\n';
  for (const auto& e : instance.edges) out << e.u << ' ' << e.v << ' ' << e.cost << '\n';
}

double tlsg_energy(const TlsgInstance& instance, std::span<const int> spins) {
  if (spins.size() != instance.vertex_count()) throw Error("one spin per vertex required");
  double h = 0.0;
  for (int s : spins) {
    if (s != 1 && s != -1) throw Error("spins must be -1 or +1");
  }
  for (const auto& e : instance.edges) h -= e.cost * spins[e.u] * spins[e.v];
  return h;
}

TlsgSolution brute_force_tlsg(const TlsgInstance& instance) {
  const std::size_t n = instance.vertex_count();
  if (n > kMaxTlsgBruteForce) {
    throw Error("brute force limited to " + std::to_string(kMaxTlsgBruteForce) + " vertices");
  }
  TlsgSolution best;
  best.energy = std::numeric_limits<double>::infinity();
  std::vector<int> spins(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) spins[i] = (mask >> (n - 1 - i)) & 1u ? 1 : -1;
    double h = 0.0;
    for (const auto& e : instance.edges) h -= e.cost * spins[e.u] * spins[e.v];
    if (h < best.energy) {
      best.energy = h;
      best.spins = spins;
    }
  }
  return best;
}

ReductionOutput reduce_to_triangle_balance(const TlsgInstance& instance) {
  const std::size_t nv = instance.vertex_count();
  const auto star = static_cast<NodeId>(nv);
  std::vector<SignedEdge> edges;
  for (std::size_t v = 0; v < nv; ++v) {
    edges.push_back({static_cast<NodeId>(v), star, SignState::Unknown, std::nullopt, {}});
  }
  for (const auto& e : instance.edges) {
    edges.push_back({static_cast<NodeId>(e.u), static_cast<NodeId>(e.v), SignState::Unknown,
                     std::nullopt, {}});
  }
  ReductionOutput out;
  out.graph = SignedGraph(nv + 1, false, std::move(edges));
  out.star_vertex = star;
  out.vertex_to_edge.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) out.vertex_to_edge[v] = v;
  out.edge_costs.assign(out.graph.edge_count(), 0.0);

  const auto& tris = out.graph.triangles();
  out.triangle_tables.resize(tris.size());
  out.edge_to_triangle.assign(instance.edges.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& te = tris[t].edges;
    // The only edge not touching the star node is the base edge.
    int base_pos = -1;
    for (int i = 0; i < 3; ++i) {
      if (te[i] >= nv) base_pos = i;
    }
    if (base_pos < 0) throw Error("reduction produced a triangle without a base edge");
    std::size_t k = te[base_pos] - nv;
    const auto& edge = instance.edges[k];
    out.edge_to_triangle[k] = t;
    int pos_u = -1, pos_v = -1;
    for (int i = 0; i < 3; ++i) {
      if (te[i] == out.vertex_to_edge[edge.u]) pos_u = i;
      if (te[i] == out.vertex_to_edge[edge.v]) pos_v = i;
    }
    if (pos_u < 0 || pos_v < 0) throw Error("reduction triangle does not match its base edge");
    for (unsigned bits = 0; bits < 8; ++bits) {
      int su = (bits >> pos_u) & 1u ? 1 : -1;
      int sv = (bits >> pos_v) & 1u ? 1 : -1;
      out.triangle_tables[t][bits] = 1.0 - edge.cost * su * sv;
    }
  }
  return out;
}

namespace {

// Flattened triangle data for the enumeration loops.
struct TriangleEval {
  std::vector<std::array<EdgeIndex, 3>> edges;
  const std::vector<std::array<double, 8>>* tables;

  explicit TriangleEval(const ReductionOutput& r) : tables(&r.triangle_tables) {
    for (const auto& t : r.graph.triangles()) edges.push_back(t.edges);
  }

  double operator()(std::span<const std::uint8_t> x) const {
    double total = 0.0;
    for (std::size_t t = 0; t < edges.size(); ++t) {
      unsigned bits = x[edges[t][0]] | (x[edges[t][1]] << 1) | (x[edges[t][2]] << 2);
      total += (*tables)[t][bits];
    }
    return total;
  }
};

void fill_bits(std::uint64_t mask, std::size_t n, BinaryAssignment& x) {
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1u);
}

}  // namespace

double balance_objective(const ReductionOutput& reduction, std::span<const std::uint8_t> x) {
  if (x.size() != reduction.graph.edge_count()) throw Error("one value per edge required");
  double total = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) {
    if (x[e] > 1) throw Error("assignment is not binary");
    total += reduction.edge_costs[e] * x[e];
  }
  return total + TriangleEval(reduction)(x);
}

BalanceSolution brute_force_balance(const ReductionOutput& reduction) {
  const std::size_t m = reduction.graph.edge_count();
  const std::size_t nv = reduction.vertex_to_edge.size();
  if (std::any_of(reduction.edge_costs.begin(), reduction.edge_costs.end(),
                  [](double c) { return c != 0.0; })) {
    throw Error("balance brute force expects zero edge costs");
  }
  TriangleEval eval(reduction);
  BalanceSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  BinaryAssignment x(m, 0);
  if (m <= 24) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      fill_bits(mask, m, x);
      double obj = eval(x);
      if (obj < best.objective) {
        best.objective = obj;
        best.x = x;
      }
    }
    return best;
  }
  if (nv > 30) throw Error("too many star edges to enumerate");
  // Star edges come first, so enumerating them in order keeps ties lexicographic.
  BinaryAssignment star(nv, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nv); ++mask) {
    fill_bits(mask, nv, star);
    std::copy(star.begin(), star.end(), x.begin());
    double obj = 0.0;
    for (std::size_t t = 0; t < eval.edges.size(); ++t) {
      const auto& te = eval.edges[t];
      int base_pos = te[0] >= nv ? 0 : te[1] >= nv ? 1 : 2;
      double cost[2];
      for (std::uint8_t b = 0; b < 2; ++b) {
        x[te[base_pos]] = b;
        unsigned bits = x[te[0]] | (x[te[1]] << 1) | (x[te[2]] << 2);
        cost[b] = (*eval.tables)[t][bits];
      }
      x[te[base_pos]] = cost[1] < cost[0] ? 1 : 0;
      obj += std::min(cost[0], cost[1]);
    }
    if (obj < best.objective) {
      best.objective = obj;
      best.x = x;
    }
  }
  return best;
}

std::vector<int> spins_from_assignment(const ReductionOutput& reduction,
                                       std::span<const std::uint8_t> x) {
  if (x.size() != reduction.graph.edge_count()) throw Error("one value per edge required");
  std::vector<int> spins(reduction.vertex_to_edge.size());
  for (std::size_t v = 0; v < spins.size(); ++v) spins[v] = x[reduction.vertex_to_edge[v]] ? 1 : -1;
  return spins;
}

BinaryAssignment assignment_from_spins(const ReductionOutput& reduction,
                                       std::span<const int> spins) {
  if (spins.size() != reduction.vertex_to_edge.size()) throw Error("one spin per vertex required");
  BinaryAssignment x(reduction.graph.edge_count(), 0);
  for (std::size_t v = 0; v < spins.size(); ++v) x[reduction.vertex_to_edge[v]] = spins[v] > 0 ? 1 : 0;
  return x;
}

namespace {

bool structure_holds(const TlsgInstance& instance, const ReductionOutput& r,
                     std::vector<std::string>& failures) {
  const std::size_t nv = instance.vertex_count();
  bool ok = true;
  auto fail = [&](const std::string& msg) {
    failures.push_back(msg);
    ok = false;
  };
  std::vector<SignedEdge> base;
  for (const auto& e : instance.edges) {
    base.push_back({static_cast<NodeId>(e.u), static_cast<NodeId>(e.v), SignState::Unknown,
                    std::nullopt, {}});
  }
  if (!enumerate_triangles(SignedGraph(nv, false, std::move(base))).empty()) {
    fail("instance graph contains a triangle");
  }
  if (r.graph.node_count() != nv + 1) fail("node count is not |V|+1");
  if (r.graph.edge_count() != nv + instance.edges.size()) fail("edge count is not |V|+|E|");
  if (r.graph.triangles().size() != instance.edges.size()) fail("triangle count is not |E|");
  std::vector<char> hit(r.graph.edge_count(), 0);
  for (std::size_t v = 0; v < nv; ++v) {
    EdgeIndex e = r.vertex_to_edge[v];
    const auto& edge = r.graph.edge(e);
    bool star_edge = (edge.source == v && edge.target == r.star_vertex) ||
                     (edge.target == v && edge.source == r.star_vertex);
    if (!star_edge || hit[e]) fail("vertex map is not a bijection onto star edges");
    hit[e] = 1;
  }
  std::vector<char> tri_hit(r.graph.triangles().size(), 0);
  for (std::size_t k = 0; k < r.edge_to_triangle.size(); ++k) {
    std::size_t t = r.edge_to_triangle[k];
    if (t >= tri_hit.size() || tri_hit[t]) {
      fail("edge map is not a bijection onto triangles");
      continue;
    }
    tri_hit[t] = 1;
  }
  return ok;
}

}  // namespace

Certificate verify_correspondence(const TlsgInstance& instance) {
  if (instance.vertex_count() > kMaxCertifiedVertices) {
    throw Error("certification limited to " + std::to_string(kMaxCertifiedVertices) +
                " vertices");
  }
  Certificate cert;
  cert.vertex_count = instance.vertex_count();
  cert.edge_count = instance.edges.size();
  auto reduction = reduce_to_triangle_balance(instance);
  cert.structure_ok = structure_holds(instance, reduction, cert.failures);

  auto tlsg = brute_force_tlsg(instance);
  auto balance = brute_force_balance(reduction);
  cert.min_energy = tlsg.energy;
  cert.min_balance = balance.objective;
  cert.tlsg_witness = tlsg.spins;
  cert.balance_witness = balance.x;

  cert.offset_ok = balance.objective == static_cast<double>(instance.edges.size()) + tlsg.energy;
  if (!cert.offset_ok) cert.failures.push_back("optimal objectives violate the offset identity");
  auto read_off = spins_from_assignment(reduction, balance.x);
  cert.balance_to_tlsg_ok = tlsg_energy(instance, read_off) == tlsg.energy;
  if (!cert.balance_to_tlsg_ok) cert.failures.push_back("balance optimum maps to a suboptimal spin vector");
  auto mapped = assignment_from_spins(reduction, tlsg.spins);
  cert.tlsg_to_balance_ok = balance_objective(reduction, mapped) == balance.objective;
  if (!cert.tlsg_to_balance_ok) cert.failures.push_back("spin optimum maps to a suboptimal assignment");
  cert.passed = cert.structure_ok && cert.offset_ok && cert.balance_to_tlsg_ok &&
                cert.tlsg_to_balance_ok;
  return cert;
}

bool check_offset_identity(const TlsgInstance& instance, std::size_t max_joint_edges) {
  auto reduction = reduce_to_triangle_balance(instance);
  const std::size_t m = reduction.graph.edge_count();
  const std::size_t nv = instance.vertex_count();
  const double offset = static_cast<double>(instance.edges.size());
  TriangleEval eval(reduction);
  BinaryAssignment x(m, 0);
  std::vector<int> spins(nv);
  auto identity_holds = [&] {
    for (std::size_t v = 0; v < nv; ++v) spins[v] = x[v] ? 1 : -1;
    double h = 0.0;
    for (const auto& e : instance.edges) h -= e.cost * spins[e.u] * spins[e.v];
    return eval(x) == offset + h;
  };
  if (m <= max_joint_edges) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      fill_bits(mask, m, x);
      if (!identity_holds()) return false;
    }
    return true;
  }
  // Every table must ignore its base edge; then star edges decide the cost.
  for (std::size_t t = 0; t < eval.edges.size(); ++t) {
    const auto& te = eval.edges[t];
    unsigned base_bit = te[0] >= nv ? 1u : te[1] >= nv ? 2u : 4u;
    for (unsigned bits = 0; bits < 8; ++bits) {
      if ((*eval.tables)[t][bits] != (*eval.tables)[t][bits ^ base_bit]) return false;
    }
  }
  if (nv > 30) throw Error("too many star edges to enumerate");
  BinaryAssignment star(nv, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nv); ++mask) {
    fill_bits(mask, nv, star);
    std::copy(star.begin(), star.end(), x.begin());
    if (!identity_holds()) return false;
  }
  return true;
}

}  // namespace signet
