#include "signet/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include "signet/random.hpp"

namespace signet {

namespace {

struct Counts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

Counts count_classes(std::span<const ScoredEdge> scored) {
  Counts c;
  for (const auto& s : scored) {
    if (!s.truth) throw Error("scored edge " + std::to_string(s.edge) + " has no ground truth");
    if (!std::isfinite(s.score)) throw Error("non-finite score");
    (*s.truth ? c.positives : c.negatives) += 1;
  }
  return c;
}

// Indices ordered by descending `key`, each run of equal keys reported once.
template <typename Key>
std::vector<std::pair<std::size_t, std::size_t>> tie_groups(std::span<const ScoredEdge> scored,
                                                            std::vector<std::size_t>& order,
                                                            Key key) {
  order.resize(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(scored[a]) > key(scored[b]); });
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && key(scored[order[j]]) == key(scored[order[i]])) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  return groups;
}

double negative_score(const ScoredEdge& s) { return 1.0 - s.score; }

}  // namespace

double auc_roc(std::span<const ScoredEdge> scored) {
  auto c = count_classes(scored);
  if (c.positives == 0 || c.negatives == 0) throw Error("AUC/ROC needs both classes");
  std::vector<std::size_t> order;
  auto groups = tie_groups(scored, order, [](const ScoredEdge& s) { return s.score; });
  // Walk from the highest score: each negative in a group loses to every
  // positive seen in earlier groups and ties with those in its own.
  double wins = 0.0;
  std::size_t positives_above = 0;
  for (auto [begin, end] : groups) {
    std::size_t pos = 0, neg = 0;
    for (std::size_t k = begin; k < end; ++k) (*scored[order[k]].truth ? pos : neg) += 1;
    wins += static_cast<double>(neg) *
            (static_cast<double>(positives_above) + 0.5 * static_cast<double>(pos));
    positives_above += pos;
  }
  return wins / (static_cast<double>(c.positives) * static_cast<double>(c.negatives));
}

std::vector<CurvePoint> roc_curve(std::span<const ScoredEdge> scored) {
  auto c = count_classes(scored);
  if (c.positives == 0 || c.negatives == 0) throw Error("ROC curve needs both classes");
  std::vector<std::size_t> order;
  auto groups = tie_groups(scored, order, [](const ScoredEdge& s) { return s.score; });
  std::vector<CurvePoint> curve{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (auto [begin, end] : groups) {
    for (std::size_t k = begin; k < end; ++k) (*scored[order[k]].truth ? tp : fp) += 1;
    curve.push_back({static_cast<double>(fp) / static_cast<double>(c.negatives),
                     static_cast<double>(tp) / static_cast<double>(c.positives)});
  }
  return curve;
}

std::vector<CurvePoint> neg_pr_curve(std::span<const ScoredEdge> scored) {
  auto c = count_classes(scored);
  if (c.negatives == 0) throw Error("negative PR curve needs a negative example");
  std::vector<std::size_t> order;
  auto groups = tie_groups(scored, order, negative_score);
  std::vector<CurvePoint> curve;
  std::size_t tp = 0, fp = 0;
  for (auto [begin, end] : groups) {
    for (std::size_t k = begin; k < end; ++k) (*scored[order[k]].truth ? fp : tp) += 1;
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (curve.empty()) curve.push_back({0.0, precision});
    curve.push_back({static_cast<double>(tp) / static_cast<double>(c.negatives), precision});
  }
  return curve;
}

double auc_neg_pr(std::span<const ScoredEdge> scored) {
  auto curve = neg_pr_curve(scored);
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].x - curve[i - 1].x) * 0.5 * (curve[i].y + curve[i - 1].y);
  }
  return area;
}

void write_curves_csv(std::ostream& out, std::span<const ScoredEdge> scored) {
  out << "curve,x,y\n";
  auto old = out.precision(12);
  for (const auto& pt : roc_curve(scored)) out << "roc," << pt.x << ',' << pt.y << '\n';
  for (const auto& pt : neg_pr_curve(scored)) out << "neg_pr," << pt.x << ',' << pt.y << '\n';
  out.precision(old);
}

std::vector<ScoredEdge> predict_sentiment_only(const SignedGraph& graph,
                                               const EvidencePartition& partition,
                                               std::span<const std::optional<double>> p) {
  if (p.size() != graph.edge_count()) throw Error("probability vector size mismatch");
  std::vector<ScoredEdge> out;
  for (EdgeIndex e : partition.pool()) {
    if (e >= graph.edge_count()) throw Error("partition edge out of range");
    if (!p[e]) throw Error("edge " + std::to_string(e) + " has no sentiment probability");
    out.push_back({e, *p[e], truth_of(graph.edge(e))});
  }
  return out;
}

namespace {

Prediction solve_targets(const SignedGraph& graph, const EvidencePartition& partition,
                         std::span<const std::optional<double>> p, const CostWeights& weights,
                         const InferenceOptions& options, bool use_edge_costs) {
  auto layout = make_layout(graph, partition);
  BuildOptions build;
  build.squared = options.squared;
  build.use_edge_costs = use_edge_costs;
  auto problem = build_problem(graph, layout, p, weights, build);
  auto solved = admm_solve(problem, options.solver);
  Prediction out;
  out.converged = solved.converged;
  out.iterations = solved.iterations;
  for (std::size_t v = 0; v < layout.free_edges.size(); ++v) {
    EdgeIndex e = layout.free_edges[v];
    out.scored.push_back({e, solved.x[v], truth_of(graph.edge(e))});
  }
  return out;
}

}  // namespace

Prediction predict_network_only(const SignedGraph& graph, const EvidencePartition& partition,
                                const CostWeights& weights, const InferenceOptions& options) {
  auto p = edge_probabilities(graph);
  return solve_targets(graph, partition, p, weights, options, false);
}

Prediction predict_combined(const SignedGraph& graph, const EvidencePartition& partition,
                            std::span<const std::optional<double>> p, const CostWeights& weights,
                            const InferenceOptions& options) {
  return solve_targets(graph, partition, p, weights, options, true);
}

std::array<double, kLooFeatureCount> loo_features(const SignedGraph& graph, EdgeIndex e) {
  const auto& edge = graph.edge(e);
  const NodeId u = edge.source, v = edge.target;
  const bool directed = graph.directed();
  std::array<double, kLooFeatureCount> f{};
  auto known = [&](EdgeIndex k) { return is_observed(graph.edge(k).sign); };
  auto positive = [&](EdgeIndex k) { return graph.edge(k).sign == SignState::ObservedPositive; };

  for (const auto& inc : graph.incident(u)) {
    if (inc.neighbor == v || inc.edge == e || !known(inc.edge)) continue;
    auto b = graph.find_edge(v, inc.neighbor);
    if (!b || !known(*b)) continue;
    std::size_t dir_a = directed && graph.edge(inc.edge).target == inc.neighbor ? 1 : 0;
    std::size_t dir_b = directed && graph.edge(*b).target == inc.neighbor ? 1 : 0;
    std::size_t idx = dir_a * 8 + (positive(inc.edge) ? 4 : 0) + dir_b * 2 + (positive(*b) ? 1 : 0);
    f[idx] += 1.0;
  }
  for (const auto& inc : graph.incident(u)) {
    if (inc.edge == e || !known(inc.edge)) continue;
    if (directed && graph.edge(inc.edge).source != u) continue;
    f[positive(inc.edge) ? 16 : 17] += 1.0;
  }
  for (const auto& inc : graph.incident(v)) {
    if (inc.edge == e || !known(inc.edge)) continue;
    if (directed && graph.edge(inc.edge).target != v) continue;
    f[positive(inc.edge) ? 18 : 19] += 1.0;
  }
  return f;
}

std::vector<SweepReport> summarize(std::span<const FoldResult> folds) {
  std::vector<SweepReport> out;
  std::vector<std::vector<const FoldResult*>> members;
  for (const auto& f : folds) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepReport& r) {
      return r.model == f.model && r.param == f.param;
    });
    if (it == out.end()) {
      out.push_back({f.model, f.param});
      members.emplace_back();
      it = std::prev(out.end());
    }
    members[static_cast<std::size_t>(it - out.begin())].push_back(&f);
  }
  auto mean_se = [](const std::vector<const FoldResult*>& m, double FoldResult::*field) {
    double mean = 0.0;
    for (auto* f : m) mean += f->*field;
    mean /= static_cast<double>(m.size());
    if (m.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (auto* f : m) ss += (f->*field - mean) * (f->*field - mean);
    double sd = std::sqrt(ss / static_cast<double>(m.size() - 1));
    return std::pair{mean, sd / std::sqrt(static_cast<double>(m.size()))};
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].folds = members[i].size();
    std::tie(out[i].auc_roc_mean, out[i].auc_roc_se) = mean_se(members[i], &FoldResult::auc_roc);
    std::tie(out[i].auc_neg_pr_mean, out[i].auc_neg_pr_se) =
        mean_se(members[i], &FoldResult::auc_neg_pr);
  }
  return out;
}

namespace {

bool both_classes(std::span<const ScoredEdge> scored) {
  bool pos = false, neg = false;
  for (const auto& s : scored) {
    if (!s.truth) return false;
    (*s.truth ? pos : neg) = true;
  }
  return pos && neg;
}

// Runs body(i) for i in [0, n) on up to `threads` workers; rethrows the
// first failure by index.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

SweepResult loo_train_eval(const SignedGraph& graph, std::span<const std::optional<double>> p,
                           const LooOptions& options) {
  const bool with_p = !p.empty();
  if (with_p && p.size() != graph.edge_count()) throw Error("probability vector size mismatch");
  const std::size_t cols = kLooFeatureCount + (with_p ? 1 : 0);
  std::vector<std::array<double, kLooFeatureCount>> features(graph.edge_count());
  std::vector<int> labels(graph.edge_count());
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    auto t = truth_of(graph.edge(e));
    if (!t) throw Error("leave-one-out needs a sign on every edge");
    if (with_p && !p[e]) throw Error("edge " + std::to_string(e) + " has no sentiment probability");
    labels[e] = *t ? 1 : 0;
    features[e] = loo_features(graph, e);
  }
  auto rows_matrix = [&](std::span<const EdgeIndex> rows) {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& f = features[rows[r]];
      for (std::size_t c = 0; c < kLooFeatureCount; ++c) {
        if (f[c] != 0.0) trip.emplace_back(static_cast<int>(r), static_cast<int>(c), f[c]);
      }
      if (with_p && *p[rows[r]] != 0.0) {
        trip.emplace_back(static_cast<int>(r), static_cast<int>(kLooFeatureCount), *p[rows[r]]);
      }
    }
    FeatureMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
  };

  SweepResult result;
  const std::string model = with_p ? "loo+sent" : "loo";
  auto folds = random_edge_partition(graph, options.folds, substream_seed(options.seed, "loo-folds"));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<EdgeIndex> train;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train.begin(), train.end());
    std::vector<int> y;
    for (auto e : train) y.push_back(labels[e]);
    std::vector<ScoredEdge> scored;
    for (auto e : folds[f]) scored.push_back({e, 0.0, labels[e] == 1});
    auto pos = std::count(y.begin(), y.end(), 1);
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(y.size()) || !both_classes(scored)) {
      result.warnings.push_back(model + " fold " + std::to_string(f) + " skipped: single class");
      continue;
    }
    auto logreg = options.logreg;
    logreg.seed = substream_seed(options.seed, "loo-cv", f);
    auto fitted = train_logreg(rows_matrix(train), y, logreg);
    auto test = rows_matrix(folds[f]);
    for (std::size_t r = 0; r < scored.size(); ++r) {
      SparseVector row(test.cols());
      for (FeatureMatrix::InnerIterator it(test, static_cast<Eigen::Index>(r)); it; ++it) {
        row.insertBack(it.col()) = it.value();
      }
      scored[r].score = fitted.predict(row);
    }
    result.folds.push_back({model, 0.0, f, auc_roc(scored), auc_neg_pr(scored)});
  }
  result.summary = summarize(result.folds);
  return result;
}

namespace {

struct TrainTest {
  SignedGraph train;
  SignedGraph test;
};

std::vector<TrainTest> make_samples(const SignedGraph& graph, const SweepConfig& config,
                                    std::uint64_t seed) {
  const std::size_t k = config.samples;
  if (k < 2) throw Error("a sweep needs at least 2 samples");
  std::vector<SignedGraph> parts;
  if (config.mode == SamplingMode::Random) {
    auto folds = random_edge_partition(graph, k, substream_seed(seed, "sampling"));
    for (const auto& fold : folds) parts.push_back(edge_subgraph(graph, fold).graph);
  } else {
    if (graph.node_count() == 0) throw Error("cannot sample an empty graph");
    Rng rng(substream_seed(seed, "sampling"));
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(graph.node_count() - 1));
    for (std::size_t i = 0; i < k; ++i) {
      NodeId start = pick(rng);
      parts.push_back(
          bfs_sample(graph, start, config.bfs_budget, substream_seed(seed, "bfs", i)).graph);
    }
  }
  std::vector<TrainTest> out;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& train = parts[i];
    auto test = config.mode == SamplingMode::Bfs ? remove_overlap(parts[(i + 1) % k], train)
                                                 : parts[(i + 1) % k];
    out.push_back({train, std::move(test)});
  }
  return out;
}

// All models at all ratios for one (seed, fold) unit; results indexed
// [ratio][model].
std::vector<std::vector<std::optional<FoldResult>>> run_unit(
    const TrainTest& sample, std::span<const double> ratios, const SweepConfig& config,
    std::uint64_t seed, std::size_t local_fold, std::size_t fold_id,
    std::vector<std::string>& warnings) {
  std::vector<std::vector<std::optional<FoldResult>>> out(ratios.size());
  auto p_train = edge_probabilities(sample.train);
  auto p_test = edge_probabilities(sample.test);
  for (std::size_t r = 0; r < ratios.size(); ++r) {
    out[r].resize(config.models.size());
    const std::uint64_t stream = local_fold * 1024 + r;
    auto train_part = mask_all_edges(sample.train, ratios[r], substream_seed(seed, "mask-train", stream),
                                     PoolRole::Train);
    auto test_part = mask_all_edges(sample.test, ratios[r], substream_seed(seed, "mask-test", stream),
                                    PoolRole::Test);
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      const auto& model = config.models[m];
      std::vector<ScoredEdge> scored;
      if (model == "sentiment") {
        scored = predict_sentiment_only(sample.test, test_part, p_test);
      } else if (model == "network" || model == "combined") {
        auto learn = config.learn;
        learn.learn_edge_costs = model == "combined";
        learn.squared = config.inference.squared;
        auto learned = learn_weights(sample.train, train_part, p_train, learn);
        auto pred = model == "network"
                        ? predict_network_only(sample.test, test_part, learned.weights,
                                               config.inference)
                        : predict_combined(sample.test, test_part, p_test, learned.weights,
                                           config.inference);
        if (!pred.converged) {
          warnings.push_back(model + " fold " + std::to_string(fold_id) +
                             ": solver did not converge");
        }
        scored = std::move(pred.scored);
      } else {
        throw Error("unknown model '" + model + "'");
      }
      if (!both_classes(scored)) {
        warnings.push_back(model + " fold " + std::to_string(fold_id) + " skipped: single class");
        continue;
      }
      out[r][m] = FoldResult{model, ratios[r], fold_id, auc_roc(scored), auc_neg_pr(scored)};
    }
  }
  return out;
}

}  // namespace

SweepResult run_evidence_sweep(const SignedGraph& graph, std::span<const double> ratios,
                               const SweepConfig& config) {
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw Error("evidence ratios must lie in (0,1)");
  }
  if (config.seeds.empty()) throw Error("a sweep needs at least one seed");
  for (const auto& m : config.models) {
    if (m != "sentiment" && m != "network" && m != "combined") {
      throw Error("unknown model '" + m + "'");
    }
  }
  const std::size_t k = config.samples;
  const std::size_t units = config.seeds.size() * k;
  std::vector<std::vector<TrainTest>> samples(config.seeds.size());
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    samples[s] = make_samples(graph, config, config.seeds[s]);
  }

  std::vector<std::vector<std::vector<std::optional<FoldResult>>>> unit_results(units);
  std::vector<std::vector<std::string>> unit_warnings(units);
  parallel_for(units, config.threads, [&](std::size_t u) {
    std::size_t s = u / k, i = u % k;
    unit_results[u] = run_unit(samples[s][i], ratios, config, config.seeds[s], i, u,
                               unit_warnings[u]);
  });

  SweepResult result;
  for (std::size_t r = 0; r < ratios.size(); ++r) {
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      for (std::size_t u = 0; u < units; ++u) {
        if (unit_results[u][r][m]) result.folds.push_back(*unit_results[u][r][m]);
      }
    }
  }
  for (auto& w : unit_warnings) result.warnings.insert(result.warnings.end(), w.begin(), w.end());
  result.summary = summarize(result.folds);
  return result;
}

SweepResult run_feature_drop_sweep(const SignedGraph& graph,
                                   std::span<const LabeledDocument> corpus,
                                   std::span<const std::size_t> m_values, double fixed_ratio,
                                   const SentimentTrainOptions& sentiment,
                                   const SweepConfig& config) {
  auto rows = sample_rows(corpus.size(), sentiment.sample_size, sentiment.seed);
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (auto i : rows) {
    texts.push_back(corpus[i].text);
    labels.push_back(corpus[i].positive ? 1 : 0);
  }
  auto vocab = build_vocabulary(texts, sentiment.max_features, sentiment.banned_prefixes);
  auto x = featurize_corpus(texts, vocab);
  auto ranking = rank_features_mi(x, labels);
  for (std::size_t m : m_values) {
    if (m > vocab.size()) {
      throw Error("cannot drop " + std::to_string(m) + " of " + std::to_string(vocab.size()) +
                  " features");
    }
  }

  SweepResult result;
  std::vector<FoldResult> network_rows;
  bool network_done = false;
  const double ratios[] = {fixed_ratio};
  for (std::size_t m : m_values) {
    auto kept = drop_top_features(vocab.size(), m, ranking);
    SentimentModel model;
    model.vocab = restrict_vocabulary(vocab, kept);
    auto logreg = sentiment.logreg;
    logreg.seed = substream_seed(sentiment.seed, "sentiment-cv");
    model.model = train_logreg(select_columns(x, kept), labels, logreg);
    std::vector<std::optional<double>> p(graph.edge_count());
    for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
      p[e] = predict_proba(model, graph.edge(e).text);
    }
    auto scored_graph = with_probabilities(graph, p);

    // The network model never reads p, so its rows are the same for every m.
    auto cfg = config;
    if (network_done) {
      cfg.models.erase(std::remove(cfg.models.begin(), cfg.models.end(), "network"),
                       cfg.models.end());
    }
    auto sweep = run_evidence_sweep(scored_graph, ratios, cfg);
    result.warnings.insert(result.warnings.end(), sweep.warnings.begin(), sweep.warnings.end());
    if (!network_done) {
      for (const auto& f : sweep.folds) {
        if (f.model == "network") network_rows.push_back(f);
      }
      network_done = true;
    }
    for (const auto& model_name : config.models) {
      if (model_name == "network") {
        for (auto f : network_rows) {
          f.param = static_cast<double>(m);
          result.folds.push_back(f);
        }
        continue;
      }
      for (auto f : sweep.folds) {
        if (f.model != model_name) continue;
        f.param = static_cast<double>(m);
        result.folds.push_back(f);
      }
    }
  }
  result.summary = summarize(result.folds);
  return result;
}

void write_fold_csv(std::ostream& out, std::span<const FoldResult> folds) {
  out << "model,sweep_param,fold,auc_roc,auc_neg_pr\n";
  auto old = out.precision(12);
  for (const auto& f : folds) {
    out << f.model << ',' << f.param << ',' << f.fold << ',' << f.auc_roc << ',' << f.auc_neg_pr
        << '\n';
  }
  out.precision(old);
}

void write_scores_tsv(std::ostream& out, const SignedGraph& graph,
                      std::span<const ScoredEdge> scored) {
  out << "edge\tsource\ttarget\tscore\ttruth\n";
  auto old = out.precision(12);
  for (const auto& s : scored) {
    const auto& e = graph.edge(s.edge);
    out << s.edge << '\t' << graph.label(e.source) << '\t' << graph.label(e.target) << '\t'
        << s.score << '\t' << (s.truth ? (*s.truth ? "+1" : "-1") : "?") << '\n';
  }
  out.precision(old);
}

}  // namespace signet
