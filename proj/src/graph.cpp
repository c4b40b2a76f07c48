#include "signet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "signet/random.hpp"

namespace signet {

namespace {

std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::uint64_t directed_key(NodeId a, NodeId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string format_p(double p) {
  std::ostringstream os;
  os.precision(17);
  os << p;
  return os.str();
}

}  // namespace

struct SignedGraph::TriangleCache {
  std::once_flag once;
  std::vector<Triangle> triangles;
};

SignedGraph::SignedGraph() : triangle_cache_(std::make_shared<TriangleCache>()) {
  adjacency_offsets_.assign(1, 0);
}

SignedGraph::SignedGraph(std::size_t node_count, bool directed, std::vector<SignedEdge> edges,
                         std::vector<std::string> labels)
    : node_count_(node_count),
      directed_(directed),
      edges_(std::move(edges)),
      labels_(std::move(labels)),
      triangle_cache_(std::make_shared<TriangleCache>()) {
  if (!labels_.empty() && labels_.size() != node_count_) {
    throw Error("label count does not match node count");
  }
  std::vector<std::size_t> degree(node_count_, 0);
  std::unordered_map<std::uint64_t, EdgeIndex> seen;
  seen.reserve(edges_.size() * 2);
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.source >= node_count_ || edge.target >= node_count_) {
      throw Error("edge " + std::to_string(e) + " has an endpoint out of range");
    }
    if (edge.source == edge.target) {
      throw Error("edge " + std::to_string(e) + " is a self-loop");
    }
    if (edge.p && (!std::isfinite(*edge.p) || *edge.p < 0.0 || *edge.p > 1.0)) {
      throw Error("edge " + std::to_string(e) + " has p outside [0,1]");
    }
    if (!seen.emplace(pair_key(edge.source, edge.target), e).second) {
      throw Error("more than one edge between nodes " + std::to_string(edge.source) + " and " +
                  std::to_string(edge.target));
    }
    ++degree[edge.source];
    ++degree[edge.target];
  }
  adjacency_offsets_.assign(node_count_ + 1, 0);
  for (std::size_t v = 0; v < node_count_; ++v) {
    adjacency_offsets_[v + 1] = adjacency_offsets_[v] + degree[v];
  }
  adjacency_.resize(adjacency_offsets_.back());
  std::vector<std::size_t> cursor(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    adjacency_[cursor[edge.source]++] = {edge.target, e};
    adjacency_[cursor[edge.target]++] = {edge.source, e};
  }
  for (std::size_t v = 0; v < node_count_; ++v) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[v]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[v + 1]),
              [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
  }
}

std::string SignedGraph::label(NodeId v) const {
  if (labels_.empty()) return std::to_string(v);
  return labels_.at(v);
}

std::span<const SignedGraph::Incidence> SignedGraph::incident(NodeId v) const {
  return {adjacency_.data() + adjacency_offsets_.at(v),
          adjacency_offsets_.at(v + 1) - adjacency_offsets_.at(v)};
}

std::optional<EdgeIndex> SignedGraph::find_edge(NodeId u, NodeId v) const {
  if (u >= node_count_ || v >= node_count_) return std::nullopt;
  auto adj = incident(u);
  auto it = std::lower_bound(adj.begin(), adj.end(), v,
                             [](const Incidence& a, NodeId x) { return a.neighbor < x; });
  if (it != adj.end() && it->neighbor == v) return it->edge;
  return std::nullopt;
}

const std::vector<Triangle>& SignedGraph::triangles() const {
  std::call_once(triangle_cache_->once,
                 [this] { triangle_cache_->triangles = enumerate_triangles(*this); });
  return triangle_cache_->triangles;
}

// ---------------------------------------------------------------------------
// Edge-list IO

std::string escape_text(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_text(const std::string& escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c != '\\' || i + 1 == escaped.size()) {
      out += c;
      continue;
    }
    char n = escaped[++i];
    switch (n) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += n;
    }
  }
  return out;
}

SignedGraph parse_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<bool> directed;
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = ids.emplace(name, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(name);
    return it->second;
  };

  std::vector<SignedEdge> edges;
  std::vector<std::size_t> edge_line;
  std::unordered_map<std::uint64_t, std::size_t> slot;  // key -> position in edges

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto body = line.substr(1);
      body.erase(0, body.find_first_not_of(' '));
      if (body.rfind("directed=", 0) == 0) {
        auto value = body.substr(9);
        if (value == "true") {
          directed = true;
        } else if (value == "false") {
          directed = false;
        } else {
          throw ParseError(line_no, "directed must be true or false");
        }
      } else if (body.rfind("nodes=", 0) == 0) {
        if (!labels.empty()) throw ParseError(line_no, "nodes line must precede edge rows");
        std::size_t n = 0;
        try {
          n = std::stoul(body.substr(6));
        } catch (const std::exception&) {
          throw ParseError(line_no, "invalid node count");
        }
        for (std::size_t v = 0; v < n; ++v) intern(std::to_string(v));
      }
      continue;
    }
    if (!directed) throw ParseError(line_no, "missing '# directed=' header");

    auto cols = split_tabs(line);
    if (cols.size() != 4 && cols.size() != 5) {
      throw ParseError(line_no, "expected 4 or 5 tab-separated columns, got " +
                                    std::to_string(cols.size()));
    }
    if (cols[0].empty() || cols[1].empty()) throw ParseError(line_no, "empty node name");
    SignedEdge edge;
    if (cols[2] == "+1" || cols[2] == "1") {
      edge.sign = SignState::ObservedPositive;
    } else if (cols[2] == "-1") {
      edge.sign = SignState::ObservedNegative;
    } else if (cols[2] == "?") {
      edge.sign = SignState::Unknown;
    } else {
      throw ParseError(line_no, "sign must be +1, -1 or ?, got '" + cols[2] + "'");
    }
    if (cols[3] != "-") {
      double p = 0;
      try {
        std::size_t used = 0;
        p = std::stod(cols[3], &used);
        if (used != cols[3].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(line_no, "invalid probability '" + cols[3] + "'");
      }
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw ParseError(line_no, "probability outside [0,1]");
      }
      edge.p = p;
    }
    if (cols.size() == 5) edge.text = unescape_text(cols[4]);
    edge.source = intern(cols[0]);
    edge.target = intern(cols[1]);
    if (edge.source == edge.target) throw ParseError(line_no, "self-loop");

    auto exact = *directed ? directed_key(edge.source, edge.target)
                           : pair_key(edge.source, edge.target);
    auto pair = pair_key(edge.source, edge.target);
    if (auto it = slot.find(pair); it != slot.end()) {
      const auto& prev = edges[it->second];
      auto prev_exact = *directed ? directed_key(prev.source, prev.target)
                                  : pair_key(prev.source, prev.target);
      if (prev_exact != exact) {
        throw ParseError(line_no, "parallel edge in opposite direction (first seen on line " +
                                      std::to_string(edge_line[it->second]) + ")");
      }
      edges[it->second] = std::move(edge);
      edge_line[it->second] = line_no;
    } else {
      slot.emplace(pair, edges.size());
      edges.push_back(std::move(edge));
      edge_line.push_back(line_no);
    }
  }
  if (!directed) {
    if (line_no == 0) throw ParseError(0, "empty input");
    throw ParseError(line_no, "missing '# directed=' header");
  }
  bool numeric = true;
  for (std::size_t v = 0; v < labels.size() && numeric; ++v) {
    numeric = labels[v] == std::to_string(v);
  }
  if (numeric) labels.clear();
  std::size_t n = numeric ? ids.size() : labels.size();
  return SignedGraph(n, *directed, std::move(edges), std::move(labels));
}

SignedGraph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const SignedGraph& graph) {
  out << "# directed=" << (graph.directed() ? "true" : "false") << '\n';
  if (graph.labels().empty()) out << "# nodes=" << graph.node_count() << '\n';
  for (const auto& e : graph.edges()) {
    out << graph.label(e.source) << '\t' << graph.label(e.target) << '\t';
    switch (e.sign) {
      case SignState::ObservedPositive: out << "+1"; break;
      case SignState::ObservedNegative: out << "-1"; break;
      case SignState::Unknown: out << '?'; break;
    }
    out << '\t' << (e.p ? format_p(*e.p) : std::string("-"));
    if (!e.text.empty()) out << '\t' << escape_text(e.text);
    out << '\n';
  }
}

void write_edge_list(const std::string& path, const SignedGraph& graph) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_edge_list(out, graph);
  if (!out) throw Error("failed writing " + path);
}

// ---------------------------------------------------------------------------
// Triangles

std::vector<Triangle> enumerate_triangles(const SignedGraph& graph) {
  std::vector<Triangle> out;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    auto adj_u = graph.incident(u);
    for (const auto& uv : adj_u) {
      NodeId v = uv.neighbor;
      if (v <= u) continue;
      auto adj_v = graph.incident(v);
      // Merge the sorted neighbor lists, keeping common neighbors w > v.
      auto a = std::upper_bound(adj_u.begin(), adj_u.end(), v,
                                [](NodeId x, const auto& inc) { return x < inc.neighbor; });
      auto b = std::upper_bound(adj_v.begin(), adj_v.end(), v,
                                [](NodeId x, const auto& inc) { return x < inc.neighbor; });
      while (a != adj_u.end() && b != adj_v.end()) {
        if (a->neighbor < b->neighbor) {
          ++a;
        } else if (b->neighbor < a->neighbor) {
          ++b;
        } else {
          Triangle t{{uv.edge, a->edge, b->edge}};
          std::sort(t.edges.begin(), t.edges.end());
          out.push_back(t);
          ++a;
          ++b;
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::optional<double>> edge_probabilities(const SignedGraph& graph) {
  std::vector<std::optional<double>> p;
  p.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) p.push_back(e.p);
  return p;
}

SignedGraph with_probabilities(const SignedGraph& graph,
                               std::span<const std::optional<double>> p) {
  if (p.size() != graph.edge_count()) throw Error("probability vector size mismatch");
  auto edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) edges[e].p = p[e];
  return SignedGraph(graph.node_count(), graph.directed(), std::move(edges), graph.labels());
}

std::optional<bool> truth_of(const SignedEdge& edge) {
  switch (edge.sign) {
    case SignState::ObservedPositive: return true;
    case SignState::ObservedNegative: return false;
    case SignState::Unknown: return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

Subgraph induced_subgraph(const SignedGraph& graph, std::vector<NodeId> nodes) {
  std::vector<char> member(graph.node_count(), 0);
  for (NodeId v : nodes) member[v] = 1;
  Subgraph out;
  std::vector<SignedEdge> edges;
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    if (member[edge.source] && member[edge.target]) {
      edges.push_back(edge);
      out.parent_edges.push_back(e);
    }
  }
  out.graph = SignedGraph(graph.node_count(), graph.directed(), std::move(edges), graph.labels());
  out.nodes = std::move(nodes);
  return out;
}

}  // namespace

Subgraph bfs_sample(const SignedGraph& graph, NodeId seed, std::size_t node_budget,
                    std::uint64_t rng_seed) {
  if (seed >= graph.node_count()) throw Error("BFS seed node out of range");
  if (node_budget < 1) throw Error("BFS node budget must be at least 1");
  Rng rng(rng_seed);
  std::vector<char> visited(graph.node_count(), 0);
  std::vector<NodeId> order{seed};
  visited[seed] = 1;
  std::queue<NodeId> frontier;
  frontier.push(seed);
  std::vector<NodeId> neighbors;
  while (!frontier.empty() && order.size() < node_budget) {
    NodeId u = frontier.front();
    frontier.pop();
    neighbors.clear();
    for (const auto& inc : graph.incident(u)) neighbors.push_back(inc.neighbor);
    std::shuffle(neighbors.begin(), neighbors.end(), rng);
    for (NodeId v : neighbors) {
      if (visited[v]) continue;
      visited[v] = 1;
      order.push_back(v);
      frontier.push(v);
      if (order.size() == node_budget) break;
    }
  }
  return induced_subgraph(graph, std::move(order));
}

Subgraph edge_subgraph(const SignedGraph& graph, std::span<const EdgeIndex> edges) {
  std::vector<EdgeIndex> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Subgraph out;
  std::vector<SignedEdge> kept;
  std::vector<char> member(graph.node_count(), 0);
  for (EdgeIndex e : sorted) {
    kept.push_back(graph.edge(e));
    member[kept.back().source] = member[kept.back().target] = 1;
  }
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (member[v]) out.nodes.push_back(v);
  }
  out.parent_edges = std::move(sorted);
  out.graph = SignedGraph(graph.node_count(), graph.directed(), std::move(kept), graph.labels());
  return out;
}

std::vector<std::vector<EdgeIndex>> random_edge_partition(const SignedGraph& graph,
                                                          std::size_t folds,
                                                          std::uint64_t rng_seed) {
  if (folds < 2) throw Error("need at least 2 folds");
  if (folds > graph.edge_count()) throw Error("more folds than edges");
  std::vector<EdgeIndex> order(graph.edge_count());
  std::iota(order.begin(), order.end(), EdgeIndex{0});
  Rng rng(rng_seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<EdgeIndex>> out(folds);
  for (std::size_t i = 0; i < order.size(); ++i) out[i % folds].push_back(order[i]);
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

namespace {

std::vector<EdgeIndex> sorted_union(const std::vector<EdgeIndex>& a,
                                    const std::vector<EdgeIndex>& b) {
  std::vector<EdgeIndex> sa(a), sb(b), out;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<EdgeIndex> EvidencePartition::pool() const {
  return sorted_union(train_edges, test_edges);
}

std::vector<EdgeIndex> EvidencePartition::targets() const {
  auto all = pool();
  std::vector<EdgeIndex> ev(evidence), out;
  std::sort(ev.begin(), ev.end());
  std::set_difference(all.begin(), all.end(), ev.begin(), ev.end(), std::back_inserter(out));
  return out;
}

EvidencePartition apply_evidence_mask(const SignedGraph& graph,
                                      std::span<const EdgeIndex> edge_pool,
                                      double evidence_ratio, std::uint64_t rng_seed,
                                      PoolRole role) {
  if (!(evidence_ratio >= 0.0 && evidence_ratio <= 1.0)) {
    throw Error("evidence ratio must lie in [0,1]");
  }
  std::vector<EdgeIndex> pool(edge_pool.begin(), edge_pool.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  for (EdgeIndex e : pool) {
    if (!is_observed(graph.edge(e).sign)) {
      throw Error("pool edge " + std::to_string(e) + " has no ground-truth sign");
    }
  }
  auto count = static_cast<std::size_t>(std::llround(evidence_ratio * pool.size()));
  std::vector<EdgeIndex> shuffled = pool;
  Rng rng(rng_seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EvidencePartition out;
  out.evidence.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.evidence.begin(), out.evidence.end());
  (role == PoolRole::Train ? out.train_edges : out.test_edges) = std::move(pool);
  return out;
}

EvidencePartition mask_all_edges(const SignedGraph& graph, double evidence_ratio,
                                 std::uint64_t rng_seed, PoolRole role) {
  std::vector<EdgeIndex> pool(graph.edge_count());
  std::iota(pool.begin(), pool.end(), EdgeIndex{0});
  return apply_evidence_mask(graph, pool, evidence_ratio, rng_seed, role);
}

EvidencePartition partition_from_observed(const SignedGraph& graph) {
  EvidencePartition out;
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    out.test_edges.push_back(e);
    if (is_observed(graph.edge(e).sign)) out.evidence.push_back(e);
  }
  return out;
}

SignedGraph remove_overlap(const SignedGraph& test_graph, const SignedGraph& train_graph) {
  std::unordered_map<std::uint64_t, char> train_keys;
  for (const auto& e : train_graph.edges()) {
    train_keys.emplace(train_graph.directed() ? directed_key(e.source, e.target)
                                              : pair_key(e.source, e.target),
                       1);
  }
  std::vector<SignedEdge> kept;
  for (const auto& e : test_graph.edges()) {
    auto key = test_graph.directed() ? directed_key(e.source, e.target)
                                     : pair_key(e.source, e.target);
    if (!train_keys.contains(key)) kept.push_back(e);
  }
  return SignedGraph(test_graph.node_count(), test_graph.directed(), std::move(kept),
                     test_graph.labels());
}

// ---------------------------------------------------------------------------
// Synthetic graphs

namespace {

double sample_beta(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  double x = ga(rng);
  double y = gb(rng);
  return x / (x + y);
}

}  // namespace

SignedGraph generate_synthetic(const SyntheticParams& params, std::uint64_t rng_seed) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(params.edge_prob) || !in_unit(params.camp_flip_noise) ||
      !in_unit(params.sentiment_noise)) {
    throw Error("synthetic probabilities must lie in [0,1]");
  }
  Rng rng(rng_seed);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> camp(params.nodes);
  for (auto& c : camp) c = coin(rng) ? 1 : 0;

  std::vector<SignedEdge> edges;
  for (NodeId u = 0; u < params.nodes; ++u) {
    for (NodeId v = u + 1; v < params.nodes; ++v) {
      if (unif(rng) >= params.edge_prob) continue;
      SignedEdge e;
      e.source = u;
      e.target = v;
      if (params.directed && coin(rng)) std::swap(e.source, e.target);
      bool positive = camp[u] == camp[v];
      if (unif(rng) < params.camp_flip_noise) positive = !positive;
      e.sign = sign_from_bool(positive);
      double p;
      if (unif(rng) < params.sentiment_noise) {
        p = unif(rng);
      } else {
        // Beta folded onto the correct side of 0.5.
        double b = positive ? sample_beta(rng, 5.0, 2.0) : sample_beta(rng, 2.0, 5.0);
        p = positive ? std::max(b, 1.0 - b) : std::min(b, 1.0 - b);
      }
      e.p = p;
      edges.push_back(std::move(e));
    }
  }
  return SignedGraph(params.nodes, params.directed, std::move(edges));
}

}  // namespace signet
