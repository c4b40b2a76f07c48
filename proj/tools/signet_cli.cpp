#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "signet/evaluation.hpp"
#include "signet/graph.hpp"
#include "signet/inference.hpp"
#include "signet/learning.hpp"
#include "signet/random.hpp"
#include "signet/reduction.hpp"
#include "signet/sentiment.hpp"
#include "signet/serialization.hpp"

namespace fs = std::filesystem;
using namespace signet;

namespace {

struct SolverFlags {
  double rho = 1.0;
  double eps_abs = 1e-5;
  double eps_rel = 1e-4;
  std::size_t max_iter = 20000;
  bool linear = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--rho", rho, "ADMM penalty")->check(CLI::PositiveNumber);
    cmd->add_option("--eps-abs", eps_abs, "absolute residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--eps-rel", eps_rel, "relative residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", max_iter, "ADMM iteration cap")->check(CLI::PositiveNumber);
    cmd->add_flag("--linear", linear, "use linear instead of squared triangle hinges");
  }
  SolverOptions options() const { return {rho, eps_abs, eps_rel, max_iter, false}; }
};

struct LearnFlags {
  std::size_t epochs = 50;
  double step_size = 0.0;
  double step_scale = 0.1;
  double init = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "perceptron epochs")->check(CLI::PositiveNumber);
    cmd->add_option("--step-size", step_size, "perceptron step (0 = step-scale/|targets|)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--step-scale", step_scale, "numerator of the automatic step")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--init", init, "initial value of every weight")->check(CLI::NonNegativeNumber);
  }
  LearnConfig config(const SolverFlags& solver) const {
    LearnConfig c;
    c.epochs = epochs;
    c.step_size = step_size;
    c.step_scale = step_scale;
    c.init_value = init;
    c.squared = !solver.linear;
    c.solver = solver.options();
    return c;
  }
};

std::vector<LabeledDocument> documents_from_edges(const SignedGraph& graph) {
  std::vector<LabeledDocument> docs;
  for (const auto& e : graph.edges()) {
    if (auto t = truth_of(e)) docs.push_back({*t, e.text});
  }
  return docs;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

std::string format_auc(std::span<const ScoredEdge> scored) {
  std::size_t pos = 0, neg = 0;
  for (const auto& s : scored) {
    if (!s.truth) return "";
    (*s.truth ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) return "";
  std::ostringstream ss;
  ss << "auc_roc=" << auc_roc(scored) << " auc_neg_pr=" << auc_neg_pr(scored);
  return ss.str();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge sign prediction in signed networks"};
  app.set_config("--config", "", "INI/TOML file with option defaults (flags take precedence)");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--seed", seed, "master random seed")->capture_default_str();
  app.add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a planted two-camp graph");
  SyntheticParams sp;
  bool comments = false;
  std::string synth_out;
  synth->add_option("--nodes", sp.nodes, "node count")->check(CLI::PositiveNumber);
  synth->add_option("--edge-prob", sp.edge_prob, "edge probability")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--flip-noise", sp.camp_flip_noise, "sign flip probability")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--sentiment-noise", sp.sentiment_noise, "share of uniform p")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_flag("--directed", sp.directed, "emit a directed graph");
  synth->add_flag("--comments", comments, "attach synthetic comment text");
  synth->add_option("--out", synth_out, "output edge list")->required();

  // train-sentiment
  auto* train_s = app.add_subcommand("train-sentiment", "fit the bag-of-words sentiment model");
  std::string corpus_path, train_edges_path, model_out;
  SentimentTrainOptions sto;
  train_s->add_option("--corpus", corpus_path, "label<TAB>text corpus");
  train_s->add_option("--edges", train_edges_path, "edge list whose signed edges carry text");
  train_s->add_option("--sample-size", sto.sample_size, "comments used for training")
      ->check(CLI::PositiveNumber);
  train_s->add_option("--max-features", sto.max_features, "vocabulary size")
      ->check(CLI::PositiveNumber);
  train_s->add_option("--out", model_out, "model JSON")->required();

  // predict-sentiment
  auto* predict_s = app.add_subcommand("predict-sentiment", "fill the p column");
  std::string ps_model, ps_edges, ps_speech, ps_out;
  predict_s->add_option("--model", ps_model, "model JSON");
  predict_s->add_option("--edges", ps_edges, "edge list to annotate");
  predict_s->add_option("--speech-scores", ps_speech,
                        "speaker<TAB>bill<TAB>score<TAB>vote file; builds the agreement graph");
  predict_s->add_option("--out", ps_out, "annotated edge list")->required();

  // learn
  auto* learn = app.add_subcommand("learn", "learn cost weights");
  std::string learn_edges, learn_out, learn_log;
  double learn_ratio = 0.75;
  bool learn_network_only = false;
  SolverFlags learn_solver;
  LearnFlags learn_flags;
  learn->add_option("--edges", learn_edges, "training edge list")->required();
  learn->add_option("--evidence-ratio", learn_ratio, "share of signs revealed")
      ->check(CLI::Range(0.0, 1.0));
  learn->add_flag("--network-only", learn_network_only, "keep every edge cost at 0");
  learn->add_option("--out", learn_out, "weights JSON")->required();
  learn->add_option("--log", learn_log, "training log CSV");
  learn_solver.add(learn);
  learn_flags.add(learn);

  // infer
  auto* infer = app.add_subcommand("infer", "score unknown edges");
  std::string infer_edges, infer_weights, infer_out, infer_trace, infer_curves;
  double infer_ratio = -1.0;
  bool infer_network_only = false;
  SolverFlags infer_solver;
  infer->add_option("--edges", infer_edges, "edge list")->required();
  infer->add_option("--weights", infer_weights, "weights JSON")->required();
  infer->add_option("--evidence-ratio", infer_ratio,
                    "mask all signs and reveal this share (default: infer the '?' edges)")
      ->check(CLI::Range(0.0, 1.0));
  infer->add_flag("--network-only", infer_network_only, "ignore p");
  infer->add_option("--out", infer_out, "scored edges TSV")->required();
  infer->add_option("--trace", infer_trace, "solver trace CSV");
  infer->add_option("--curves", infer_curves, "ROC and negative PR points CSV");
  infer_solver.add(infer);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "evidence-ratio or feature-drop sweep");
  std::string sweep_edges, sweep_out_dir, sweep_mode = "random";
  std::vector<double> ratios{0.125, 0.25, 0.5, 0.75};
  std::vector<std::string> models{"sentiment", "network", "combined"};
  std::vector<std::size_t> drop;
  double fixed_ratio = 0.75;
  std::size_t sweep_seeds = 1, samples = 5, budget = 350;
  SolverFlags sweep_solver;
  LearnFlags sweep_learn;
  SentimentTrainOptions sweep_sto;
  sweep->add_option("--edges", sweep_edges, "edge list")->required();
  sweep->add_option("--ratios", ratios, "evidence ratios")->delimiter(',');
  sweep->add_option("--models", models, "models to run")->delimiter(',');
  sweep->add_option("--mode", sweep_mode, "sampling mode")
      ->check(CLI::IsMember({"bfs", "random"}));
  sweep->add_option("--samples", samples, "BFS subgraphs or edge folds")->check(CLI::Range(2, 1000));
  sweep->add_option("--budget", budget, "BFS node budget")->check(CLI::PositiveNumber);
  sweep->add_option("--seeds", sweep_seeds, "number of derived seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--drop-features", drop,
                    "dropped feature counts; runs the feature-drop sweep on the edge text")
      ->delimiter(',');
  sweep->add_option("--fixed-ratio", fixed_ratio, "evidence ratio of the feature-drop sweep")
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--sample-size", sweep_sto.sample_size, "sentiment training comments")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out-dir", sweep_out_dir, "report directory")->required();
  sweep_solver.add(sweep);
  sweep_learn.add(sweep);

  // loo
  auto* loo = app.add_subcommand("loo", "leave-one-out baseline");
  std::string loo_edges, loo_out_dir;
  bool loo_sent = false;
  std::size_t loo_folds = 5;
  loo->add_option("--edges", loo_edges, "edge list")->required();
  loo->add_flag("--with-sentiment", loo_sent, "add p as a feature");
  loo->add_option("--folds", loo_folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  loo->add_option("--out-dir", loo_out_dir, "report directory")->required();

  // reduce-verify
  auto* reduce = app.add_subcommand("reduce-verify", "certify the spin-glass reduction");
  std::string instance_path, random_dims, cert_out;
  reduce->add_option("--instance", instance_path, "instance file");
  reduce->add_option("--random", random_dims, "random WxH instance instead of a file");
  reduce->add_option("--out", cert_out, "certificate JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      auto graph = generate_synthetic(sp, substream_seed(seed, "synth"));
      if (comments) {
        graph = attach_synthetic_comments(graph, {}, substream_seed(seed, "comments"));
      }
      write_edge_list(synth_out, graph);
      std::cerr << "wrote " << graph.node_count() << " nodes, " << graph.edge_count()
                << " edges to " << synth_out << '\n';
    } else if (*train_s) {
      std::vector<LabeledDocument> corpus;
      if (!corpus_path.empty() == !train_edges_path.empty()) {
        throw Error("give exactly one of --corpus and --edges");
      }
      if (!corpus_path.empty()) {
        std::ifstream in(corpus_path);
        if (!in) throw Error("cannot open " + corpus_path);
        corpus = read_corpus(in);
      } else {
        corpus = documents_from_edges(read_edge_list(train_edges_path));
      }
      sto.seed = substream_seed(seed, "sentiment");
      auto model = train_sentiment_model(corpus, sto);
      write_text_file(model_out, sentiment_model_to_json(model));
      std::cerr << "trained on " << model.sample_size << " comments, vocabulary "
                << model.vocab.size() << ", l2 " << model.model.l2 << '\n';
    } else if (*predict_s) {
      if (!ps_speech.empty()) {
        std::ifstream in(ps_speech);
        if (!in) throw Error("cannot open " + ps_speech);
        auto speeches = read_speech_scores(in);
        std::vector<double> raw;
        std::vector<int> votes;
        for (const auto& s : speeches) {
          raw.push_back(s.raw_score);
          votes.push_back(s.vote_yes ? 1 : 0);
        }
        auto graph = build_agreement_graph(speeches, platt_scale(raw, votes));
        write_edge_list(ps_out, graph);
        std::cerr << "agreement graph: " << graph.node_count() << " nodes, "
                  << graph.edge_count() << " edges, " << graph.triangles().size()
                  << " triangles\n";
      } else {
        if (ps_model.empty() || ps_edges.empty()) {
          throw Error("--model and --edges are required without --speech-scores");
        }
        auto model = sentiment_model_from_json(read_text_file(ps_model));
        auto graph = read_edge_list(ps_edges);
        std::vector<std::optional<double>> p(graph.edge_count());
        for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
          p[e] = predict_proba(model, graph.edge(e).text);
        }
        write_edge_list(ps_out, with_probabilities(graph, p));
      }
    } else if (*learn) {
      auto graph = read_edge_list(learn_edges);
      auto partition =
          mask_all_edges(graph, learn_ratio, substream_seed(seed, "mask"), PoolRole::Train);
      auto config = learn_flags.config(learn_solver);
      config.learn_edge_costs = !learn_network_only;
      auto result = learn_weights(graph, partition, edge_probabilities(graph), config);
      write_text_file(learn_out, weights_to_json(result.weights));
      if (!learn_log.empty()) {
        auto out = open_out(learn_log);
        write_training_log_csv(out, result.log);
      }
      std::size_t unconverged = 0;
      for (const auto& e : result.log) unconverged += e.converged ? 0 : 1;
      if (unconverged > 0) {
        std::cerr << "warning: MAP solve did not converge in " << unconverged << " epochs\n";
      }
    } else if (*infer) {
      auto graph = read_edge_list(infer_edges);
      auto weights = weights_from_json(read_text_file(infer_weights));
      auto partition = infer_ratio >= 0.0
                           ? mask_all_edges(graph, infer_ratio, substream_seed(seed, "mask"))
                           : partition_from_observed(graph);
      auto layout = make_layout(graph, partition);
      auto p = edge_probabilities(graph);
      BuildOptions build;
      build.squared = !infer_solver.linear;
      build.use_edge_costs = !infer_network_only;
      auto problem = build_problem(graph, layout, p, weights, build);
      auto solver = infer_solver.options();
      solver.record_trace = !infer_trace.empty();
      auto solved = admm_solve(problem, solver);
      std::vector<ScoredEdge> scored;
      for (std::size_t v = 0; v < layout.free_edges.size(); ++v) {
        EdgeIndex e = layout.free_edges[v];
        scored.push_back({e, solved.x[v], truth_of(graph.edge(e))});
      }
      {
        auto out = open_out(infer_out);
        write_scores_tsv(out, graph, scored);
      }
      if (!infer_trace.empty()) {
        auto out = open_out(infer_trace);
        write_trace_csv(out, solved.trace);
      }
      auto metrics = format_auc(scored);
      if (!infer_curves.empty()) {
        if (metrics.empty()) throw Error("curves need both classes among scored edges");
        auto out = open_out(infer_curves);
        write_curves_csv(out, scored);
      }
      std::cerr << "scored " << scored.size() << " edges, objective " << solved.objective
                << ", iterations " << solved.iterations << ", converged="
                << (solved.converged ? "true" : "false") << '\n';
      if (!solved.converged) std::cerr << "warning: solver did not converge\n";
      if (!metrics.empty()) std::cerr << metrics << '\n';
    } else if (*sweep) {
      auto graph = read_edge_list(sweep_edges);
      SweepConfig config;
      config.mode = sweep_mode == "bfs" ? SamplingMode::Bfs : SamplingMode::Random;
      config.samples = samples;
      config.bfs_budget = budget;
      config.seeds.clear();
      for (std::size_t i = 0; i < sweep_seeds; ++i) {
        config.seeds.push_back(substream_seed(seed, "sweep", i));
      }
      config.models = models;
      config.learn = sweep_learn.config(sweep_solver);
      config.inference = {!sweep_solver.linear, sweep_solver.options()};
      config.threads = threads;
      SweepResult result;
      if (drop.empty()) {
        result = run_evidence_sweep(graph, ratios, config);
      } else {
        auto corpus = documents_from_edges(graph);
        sweep_sto.seed = substream_seed(seed, "sentiment");
        result = run_feature_drop_sweep(graph, corpus, drop, fixed_ratio, sweep_sto, config);
      }
      print_warnings(result.warnings);
      ensure_dir(sweep_out_dir);
      {
        auto out = open_out((fs::path(sweep_out_dir) / "folds.csv").string());
        write_fold_csv(out, result.folds);
      }
      write_text_file((fs::path(sweep_out_dir) / "summary.json").string(),
                      sweep_summary_json(result.summary));
      std::cerr << "wrote " << result.summary.size() << " aggregated rows to " << sweep_out_dir
                << '\n';
    } else if (*loo) {
      auto graph = read_edge_list(loo_edges);
      LooOptions options;
      options.folds = loo_folds;
      options.seed = substream_seed(seed, "loo");
      std::vector<std::optional<double>> p;
      if (loo_sent) p = edge_probabilities(graph);
      auto result = loo_train_eval(graph, p, options);
      print_warnings(result.warnings);
      ensure_dir(loo_out_dir);
      {
        auto out = open_out((fs::path(loo_out_dir) / "folds.csv").string());
        write_fold_csv(out, result.folds);
      }
      write_text_file((fs::path(loo_out_dir) / "summary.json").string(),
                      sweep_summary_json(result.summary));
    } else if (*reduce) {
      TlsgInstance instance;
      if (!instance_path.empty() == !random_dims.empty()) {
        throw Error("give exactly one of --instance and --random");
      }
      if (!instance_path.empty()) {
        instance = read_tlsg(instance_path);
      } else {
        std::size_t w = 0, h = 0;
        char x = 0;
        std::istringstream ds(random_dims);
        if (!(ds >> w >> x >> h) || x != 'x') throw Error("--random expects WxH");
        instance = random_tlsg(w, h, substream_seed(seed, "tlsg"));
      }
      auto cert = verify_correspondence(instance);
      write_text_file(cert_out, certificate_to_json(cert));
      std::cerr << "certificate " << (cert.passed ? "pass" : "FAIL") << ": min H "
                << cert.min_energy << ", min balance " << cert.min_balance << '\n';
      return cert.passed ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
