#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "signet/graph.hpp"

namespace signet {
namespace {

SignedGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

SignedGraph complete_graph(std::size_t n) {
  std::vector<SignedEdge> edges;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) edges.push_back({a, b, SignState::ObservedPositive, 0.5, ""});
  }
  return SignedGraph(n, false, edges);
}

SignedGraph random_graph(std::size_t n, double prob, std::mt19937_64& rng, bool directed) {
  std::bernoulli_distribution coin(prob), flip(0.5);
  std::vector<SignedEdge> edges;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (!coin(rng)) continue;
      SignedEdge e{a, b, sign_from_bool(flip(rng)), std::nullopt, ""};
      if (directed && flip(rng)) std::swap(e.source, e.target);
      edges.push_back(e);
    }
  }
  return SignedGraph(n, directed, edges);
}

TEST(ParseEdgeList, MapsSignsAndProbabilities) {
  auto g = parse("# directed=true\na\tb\t+1\t0.9\tnice work\nb\tc\t+1\t-\nc\ta\t-1\t0.1\n");
  ASSERT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_TRUE(g.directed());
  int pos = 0, neg = 0;
  for (const auto& e : g.edges()) {
    pos += e.sign == SignState::ObservedPositive;
    neg += e.sign == SignState::ObservedNegative;
  }
  EXPECT_EQ(pos, 2);
  EXPECT_EQ(neg, 1);
  EXPECT_DOUBLE_EQ(*g.edge(0).p, 0.9);
  EXPECT_FALSE(g.edge(1).p.has_value());
  EXPECT_EQ(g.edge(0).text, "nice work");
  EXPECT_EQ(g.label(0), "a");
}

TEST(ParseEdgeList, HeaderOnlyIsEmpty) {
  auto g = parse("# directed=false\n");
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_FALSE(g.directed());
}

TEST(ParseEdgeList, UnknownSign) {
  auto g = parse("# directed=false\n0\t1\t?\t0.4\n");
  EXPECT_EQ(g.edge(0).sign, SignState::Unknown);
  EXPECT_FALSE(truth_of(g.edge(0)).has_value());
}

TEST(ParseEdgeList, ErrorsCarryLineNumbers) {
  try {
    parse("# directed=false\n0\t1\t+1\t0.5\n1\t2\t+2\t0.5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("# directed=false\n0\t1\t+1\t1.5\n"), ParseError);
  EXPECT_THROW(parse("# directed=false\n0\t1\n"), ParseError);
  EXPECT_THROW(parse("# directed=false\n0\t1\t+1\tabc\n"), ParseError);
}

TEST(ParseEdgeList, LastDuplicateWins) {
  auto g = parse("# directed=false\n0\t1\t+1\t0.5\n0\t1\t-1\t0.2\n");
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edge(0).sign, SignState::ObservedNegative);
  EXPECT_DOUBLE_EQ(*g.edge(0).p, 0.2);
}

TEST(ParseEdgeList, RejectsOppositeParallelEdges) {
  EXPECT_THROW(parse("# directed=true\n0\t1\t+1\t0.5\n1\t0\t+1\t0.5\n"), Error);
}

TEST(SignedGraph, RejectsSelfLoopsAndBadP) {
  EXPECT_THROW(SignedGraph(2, false, {{0, 0, SignState::Unknown, std::nullopt, ""}}), Error);
  EXPECT_THROW(SignedGraph(2, false, {{0, 1, SignState::Unknown, -0.1, ""}}), Error);
  EXPECT_THROW(SignedGraph(2, false, {{0, 5, SignState::Unknown, std::nullopt, ""}}), Error);
}

TEST(EdgeListRoundTrip, TextAndFieldsSurvive) {
  auto g = parse("# directed=true\nx\ty\t+1\t0.25\ttab\\there\nz\tx\t?\t-\n");
  std::ostringstream out;
  write_edge_list(out, g);
  auto h = parse(out.str());
  ASSERT_EQ(h.edge_count(), g.edge_count());
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    EXPECT_EQ(h.edge(e).source, g.edge(e).source);
    EXPECT_EQ(h.edge(e).target, g.edge(e).target);
    EXPECT_EQ(h.edge(e).sign, g.edge(e).sign);
    EXPECT_EQ(h.edge(e).p, g.edge(e).p);
    EXPECT_EQ(h.edge(e).text, g.edge(e).text);
  }
  EXPECT_EQ(unescape_text(escape_text("a\tb\nc\\d")), "a\tb\nc\\d");
}

TEST(Triangles, CompleteGraphK4) {
  EXPECT_EQ(enumerate_triangles(complete_graph(4)).size(), 4u);
}

TEST(Triangles, ChordlessFiveCycle) {
  std::vector<SignedEdge> edges;
  for (NodeId i = 0; i < 5; ++i) edges.push_back({i, (i + 1) % 5, SignState::Unknown, std::nullopt, ""});
  EXPECT_TRUE(enumerate_triangles(SignedGraph(5, false, edges)).empty());
}

TEST(Triangles, DirectionIgnored) {
  std::vector<SignedEdge> edges = {{0, 1, SignState::Unknown, std::nullopt, ""},
                                   {2, 1, SignState::Unknown, std::nullopt, ""},
                                   {0, 2, SignState::Unknown, std::nullopt, ""}};
  EXPECT_EQ(enumerate_triangles(SignedGraph(3, true, edges)).size(), 1u);
}

TEST(Triangles, MatchesTripleEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 120; ++trial) {
    std::size_t n = 3 + rng() % 48;
    double prob = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    auto g = random_graph(n, prob, rng, trial % 2 == 1);
    auto got = enumerate_triangles(g);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, oracle::triple_triangles(g)) << "trial " << trial;
    for (const auto& t : got) EXPECT_TRUE(std::is_sorted(t.edges.begin(), t.edges.end()));
    auto cached = g.triangles();
    std::sort(cached.begin(), cached.end());
    EXPECT_EQ(cached, got);
  }
}

TEST(BfsSample, BudgetOneIsSeedOnly) {
  auto s = bfs_sample(complete_graph(6), 2, 1, 11);
  ASSERT_EQ(s.nodes.size(), 1u);
  EXPECT_EQ(s.nodes[0], 2u);
  EXPECT_EQ(s.graph.edge_count(), 0u);
}

TEST(BfsSample, SaturatesComponent) {
  // Two components: a triangle {0,1,2} and an edge {3,4}.
  std::vector<SignedEdge> edges = {{0, 1, SignState::ObservedPositive, std::nullopt, ""},
                                   {1, 2, SignState::ObservedPositive, std::nullopt, ""},
                                   {2, 0, SignState::ObservedNegative, std::nullopt, ""},
                                   {3, 4, SignState::ObservedPositive, std::nullopt, ""}};
  SignedGraph g(5, true, edges);
  auto s = bfs_sample(g, 1, 100, 3);
  EXPECT_EQ(std::set<NodeId>(s.nodes.begin(), s.nodes.end()), (std::set<NodeId>{0, 1, 2}));
  EXPECT_EQ(s.graph.edge_count(), 3u);
  EXPECT_EQ(s.graph.node_count(), g.node_count());
  for (EdgeIndex e = 0; e < s.graph.edge_count(); ++e) {
    EXPECT_EQ(s.graph.edge(e).source, g.edge(s.parent_edges[e]).source);
  }
}

TEST(BfsSample, DeterministicAndErrors) {
  std::mt19937_64 rng(1);
  auto g = random_graph(60, 0.1, rng, true);
  auto a = bfs_sample(g, 0, 20, 99);
  auto b = bfs_sample(g, 0, 20, 99);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.parent_edges, b.parent_edges);
  EXPECT_THROW(bfs_sample(g, 60, 5, 1), Error);
  EXPECT_THROW(bfs_sample(g, 0, 0, 1), Error);
}

TEST(RandomEdgePartition, SizesAndCover) {
  auto ten = complete_graph(5);  // 10 edges
  auto folds = random_edge_partition(ten, 5, 4);
  ASSERT_EQ(folds.size(), 5u);
  for (const auto& f : folds) EXPECT_EQ(f.size(), 2u);

  std::vector<SignedEdge> edges(complete_graph(5).edges());
  edges.push_back({0, 5, SignState::ObservedPositive, std::nullopt, ""});
  SignedGraph eleven(6, false, edges);
  auto f11 = random_edge_partition(eleven, 5, 4);
  std::multiset<std::size_t> sizes;
  std::vector<EdgeIndex> all;
  for (const auto& f : f11) {
    sizes.insert(f.size());
    all.insert(all.end(), f.begin(), f.end());
  }
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{2, 2, 2, 2, 3}));
  std::sort(all.begin(), all.end());
  for (EdgeIndex e = 0; e < all.size(); ++e) EXPECT_EQ(all[e], e);
  EXPECT_EQ(all.size(), 11u);

  EXPECT_EQ(random_edge_partition(eleven, 5, 4), f11);
  EXPECT_THROW(random_edge_partition(eleven, 12, 4), Error);
  EXPECT_THROW(random_edge_partition(eleven, 1, 4), Error);
}

TEST(EvidenceMask, CountsAndBoundaries) {
  std::vector<SignedEdge> edges;
  for (NodeId i = 0; i < 8; ++i) edges.push_back({i, i + 1, SignState::ObservedPositive, std::nullopt, ""});
  SignedGraph g(9, false, edges);
  std::vector<EdgeIndex> pool(8);
  for (EdgeIndex e = 0; e < 8; ++e) pool[e] = e;

  auto m = apply_evidence_mask(g, pool, 0.75, 5);
  EXPECT_EQ(m.evidence.size(), 6u);
  EXPECT_EQ(m.targets().size(), 2u);
  EXPECT_TRUE(std::includes(pool.begin(), pool.end(), m.evidence.begin(), m.evidence.end()));
  EXPECT_EQ(m.pool(), pool);

  EXPECT_EQ(apply_evidence_mask(g, pool, 0.0, 5).targets().size(), 8u);
  EXPECT_TRUE(apply_evidence_mask(g, pool, 1.0, 5).targets().empty());

  auto again = apply_evidence_mask(g, pool, 0.75, 5);
  EXPECT_EQ(again.evidence, m.evidence);
}

TEST(EvidenceMask, CountFormulaOverRatios) {
  auto g = complete_graph(12);  // 66 edges
  for (double r : {0.0, 0.1, 0.125, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    auto m = mask_all_edges(g, r, 3);
    EXPECT_EQ(m.evidence.size(), static_cast<std::size_t>(std::lround(r * 66.0)));
    EXPECT_EQ(m.evidence.size() + m.targets().size(), 66u);
  }
}

TEST(PartitionFromObserved, SplitsBySignState) {
  auto g = parse("# directed=false\n0\t1\t+1\t-\n1\t2\t?\t0.3\n2\t0\t-1\t-\n");
  auto part = partition_from_observed(g);
  EXPECT_EQ(part.evidence, (std::vector<EdgeIndex>{0, 2}));
  EXPECT_EQ(part.targets(), (std::vector<EdgeIndex>{1}));
}

TEST(RemoveOverlap, SetDifferenceLaws) {
  std::mt19937_64 rng(3);
  auto g = random_graph(20, 0.3, rng, true);
  EXPECT_EQ(remove_overlap(g, g).edge_count(), 0u);
  SignedGraph empty(g.node_count(), true, {});
  EXPECT_EQ(remove_overlap(g, empty).edge_count(), g.edge_count());

  std::vector<SignedEdge> five;
  for (NodeId i = 0; i < 5; ++i) five.push_back({i, i + 1, SignState::ObservedPositive, std::nullopt, ""});
  SignedGraph test(10, true, five);
  SignedGraph shared(10, true, {five[2]});
  EXPECT_EQ(remove_overlap(test, shared).edge_count(), 4u);
  SignedGraph disjoint(10, true, {{7, 8, SignState::ObservedPositive, std::nullopt, ""}});
  EXPECT_EQ(remove_overlap(test, disjoint).edge_count(), 5u);
  // Orientation matters when directed.
  SignedGraph reversed(10, true, {{1, 0, SignState::ObservedPositive, std::nullopt, ""}});
  EXPECT_EQ(remove_overlap(test, reversed).edge_count(), 5u);
}

TEST(Synthetic, NoiselessPlantIsBalanced) {
  SyntheticParams params;
  params.nodes = 60;
  params.edge_prob = 0.2;
  params.camp_flip_noise = 0.0;
  params.sentiment_noise = 0.0;
  auto g = generate_synthetic(params, 12);
  ASSERT_GT(g.edge_count(), 0u);
  for (const auto& e : g.edges()) {
    ASSERT_TRUE(e.p.has_value());
    EXPECT_EQ(*e.p > 0.5, e.sign == SignState::ObservedPositive);
  }
  for (const auto& t : g.triangles()) {
    int negatives = 0;
    for (EdgeIndex e : t.edges) negatives += g.edge(e).sign == SignState::ObservedNegative;
    EXPECT_EQ(negatives % 2, 0);
  }
}

TEST(Synthetic, Deterministic) {
  SyntheticParams params;
  params.nodes = 40;
  std::ostringstream a, b;
  write_edge_list(a, generate_synthetic(params, 5));
  write_edge_list(b, generate_synthetic(params, 5));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Synthetic, PureNoiseCarriesNoSignal) {
  SyntheticParams params;
  params.nodes = 150;
  params.sentiment_noise = 1.0;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = generate_synthetic(params, seed);
    std::vector<ScoredEdge> s;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) s.push_back({e, *g.edge(e).p, truth_of(g.edge(e))});
    total += auc_roc(s);
  }
  EXPECT_NEAR(total / 10.0, 0.5, 0.05);
}

}  // namespace
}  // namespace signet
