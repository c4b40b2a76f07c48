#include "signet/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <numeric>

#include "signet/random.hpp"

namespace signet {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      current += static_cast<char>(std::tolower(uc));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) throw Error("duplicate vocabulary term " + terms_[i]);
  }
}

std::optional<std::size_t> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const std::string> corpus, std::size_t max_features,
                            std::span<const std::string> banned_prefixes) {
  if (max_features < 1) throw Error("max_features must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) {
    for (auto& tok : tokenize(doc)) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [term, count] : counts) {
    bool banned = std::any_of(banned_prefixes.begin(), banned_prefixes.end(),
                              [&](const std::string& pre) { return term.rfind(pre, 0) == 0; });
    if (!banned) ranked.emplace_back(term, count);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_features) ranked.resize(max_features);
  std::vector<std::string> terms;
  terms.reserve(ranked.size());
  for (auto& [term, count] : ranked) terms.push_back(term);
  return Vocabulary(std::move(terms));
}

SparseVector featurize(std::string_view text, const Vocabulary& vocab) {
  SparseVector out(static_cast<Eigen::Index>(vocab.size()));
  std::map<std::size_t, double> counts;
  for (const auto& tok : tokenize(text)) {
    if (auto idx = vocab.find(tok)) counts[*idx] += 1.0;
  }
  out.reserve(static_cast<Eigen::Index>(counts.size()));
  for (auto [idx, c] : counts) out.insertBack(static_cast<Eigen::Index>(idx)) = c;
  return out;
}

FeatureMatrix featurize_corpus(std::span<const std::string> documents, const Vocabulary& vocab) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    auto row = featurize(documents[i], vocab);
    for (SparseVector::InnerIterator it(row); it; ++it) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(it.index()), it.value());
    }
  }
  FeatureMatrix m(static_cast<Eigen::Index>(documents.size()),
                  static_cast<Eigen::Index>(vocab.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_labels(std::span<const int> labels, std::size_t rows) {
  if (labels.size() != rows) throw Error("label count does not match feature rows");
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error("labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  if (pos == 0 || pos == labels.size()) throw Error("logistic regression needs both classes");
}

class LogregObjective {
 public:
  LogregObjective(const FeatureMatrix& x, std::span<const int> y, double l2)
      : x_(x), y_(static_cast<Eigen::Index>(y.size())), l2_(l2) {
    for (std::size_t i = 0; i < y.size(); ++i) y_[static_cast<Eigen::Index>(i)] = y[i];
  }

  Eigen::Index dim() const { return x_.cols(); }

  double value(const Eigen::VectorXd& w, double b) const {
    Eigen::VectorXd m = margins(w, b);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) loss += softplus(m[i]) - y_[i] * m[i];
    return loss / static_cast<double>(m.size()) + 0.5 * l2_ * w.squaredNorm();
  }

  // Gradient (weights then bias); also caches curvature weights for hessian().
  Eigen::VectorXd gradient(const Eigen::VectorXd& w, double b) {
    Eigen::VectorXd m = margins(w, b);
    const double n = static_cast<double>(m.size());
    Eigen::VectorXd resid(m.size());
    curvature_.resize(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      double s = logistic(m[i]);
      resid[i] = (s - y_[i]) / n;
      curvature_[i] = s * (1.0 - s) / n;
    }
    Eigen::VectorXd g(dim() + 1);
    g.head(dim()) = x_.transpose() * resid + l2_ * w;
    g[dim()] = resid.sum();
    return g;
  }

  Eigen::VectorXd hessian_times(const Eigen::VectorXd& v) const {
    Eigen::VectorXd t = x_ * v.head(dim());
    t.array() += v[dim()];
    t.array() *= curvature_.array();
    Eigen::VectorXd out(dim() + 1);
    out.head(dim()) = x_.transpose() * t + l2_ * v.head(dim());
    out[dim()] = t.sum();
    return out;
  }

 private:
  Eigen::VectorXd margins(const Eigen::VectorXd& w, double b) const {
    Eigen::VectorXd m = x_ * w;
    m.array() += b;
    return m;
  }

  const FeatureMatrix& x_;
  Eigen::VectorXd y_;
  double l2_;
  Eigen::VectorXd curvature_;
};

FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> rows) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (FeatureMatrix::InnerIterator it(m, static_cast<Eigen::Index>(rows[r])); it; ++it) {
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
    }
  }
  FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseVector row_vector(const FeatureMatrix& m, Eigen::Index row) {
  SparseVector v(m.cols());
  for (FeatureMatrix::InnerIterator it(m, row); it; ++it) v.insertBack(it.col()) = it.value();
  return v;
}

}  // namespace

double LogisticModel::logit(const SparseVector& x) const {
  if (x.size() != weights.size()) throw Error("feature vector size does not match model");
  double z = bias;
  for (SparseVector::InnerIterator it(x); it; ++it) z += weights[it.index()] * it.value();
  return z;
}

double LogisticModel::predict(const SparseVector& x) const { return logistic(logit(x)); }

LogisticModel fit_logreg(const FeatureMatrix& features, std::span<const int> labels, double l2,
                         const LogregOptions& options) {
  check_labels(labels, static_cast<std::size_t>(features.rows()));
  if (!(l2 > 0.0)) throw Error("l2 strength must be positive");
  LogregObjective obj(features, labels, l2);
  const Eigen::Index d = obj.dim();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double prior = 0.0;
  for (int y : labels) prior += y;
  prior /= static_cast<double>(labels.size());
  theta[d] = std::log(prior / (1.0 - prior));

  double f = obj.value(theta.head(d), theta[d]);
  for (std::size_t iter = 0; iter < options.max_newton_iterations; ++iter) {
    Eigen::VectorXd g = obj.gradient(theta.head(d), theta[d]);
    double gnorm = g.norm();
    if (gnorm <= options.gradient_tolerance) break;

    // Conjugate gradient on H s = -g, truncated at a forcing tolerance.
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd r = -g;
    Eigen::VectorXd dir = r;
    double rr = r.squaredNorm();
    const double cg_tol = std::min(0.5, std::sqrt(gnorm)) * gnorm;
    const auto cg_max = static_cast<std::size_t>(std::min<Eigen::Index>(2 * (d + 1), 2000));
    for (std::size_t k = 0; k < cg_max && std::sqrt(rr) > cg_tol; ++k) {
      Eigen::VectorXd hd = obj.hessian_times(dir);
      double curv = dir.dot(hd);
      if (curv <= 0.0) break;
      double alpha = rr / curv;
      s += alpha * dir;
      r -= alpha * hd;
      double rr_new = r.squaredNorm();
      dir = r + (rr_new / rr) * dir;
      rr = rr_new;
    }
    if (s.squaredNorm() == 0.0) s = -g;

    double slope = g.dot(s);
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      Eigen::VectorXd cand = theta + step * s;
      double fc = obj.value(cand.head(d), cand[d]);
      if (fc <= f + 1e-4 * step * slope) {
        theta = std::move(cand);
        f = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // at machine precision
  }
  LogisticModel model;
  model.weights = theta.head(d);
  model.bias = theta[d];
  model.l2 = l2;
  return model;
}

Eigen::VectorXd logreg_gradient(const FeatureMatrix& features, std::span<const int> labels,
                                const LogisticModel& model) {
  LogregObjective obj(features, labels, model.l2);
  return obj.gradient(model.weights, model.bias);
}

LogisticModel train_logreg(const FeatureMatrix& features, std::span<const int> labels,
                           const LogregOptions& options) {
  check_labels(labels, static_cast<std::size_t>(features.rows()));
  if (options.l2_grid.empty()) throw Error("empty l2 grid");
  for (double l2 : options.l2_grid) {
    if (!(l2 > 0.0)) throw Error("l2 grid values must be positive");
  }
  if (options.l2_grid.size() == 1 || options.cv_folds < 2) {
    return fit_logreg(features, labels, options.l2_grid.front(), options);
  }

  // Group identical (row, label) pairs, in order of first appearance.
  const auto n = static_cast<std::size_t>(features.rows());
  std::unordered_map<std::string, std::size_t> group_of_key;
  std::vector<std::size_t> group(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string key(1, static_cast<char>(labels[i]));
    for (FeatureMatrix::InnerIterator it(features, static_cast<Eigen::Index>(i)); it; ++it) {
      char buf[sizeof(Eigen::Index) + sizeof(double)];
      Eigen::Index col = it.col();
      double val = it.value();
      std::memcpy(buf, &col, sizeof col);
      std::memcpy(buf + sizeof col, &val, sizeof val);
      key.append(buf, sizeof buf);
    }
    group[i] = group_of_key.emplace(std::move(key), group_of_key.size()).first->second;
  }
  std::vector<std::size_t> order(group_of_key.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold_of_group(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) fold_of_group[order[k]] = k % options.cv_folds;

  std::vector<std::vector<std::size_t>> train_rows(options.cv_folds), test_rows(options.cv_folds);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t f = fold_of_group[group[i]];
    for (std::size_t k = 0; k < options.cv_folds; ++k) {
      (k == f ? test_rows[k] : train_rows[k]).push_back(i);
    }
  }

  double best_score = -std::numeric_limits<double>::infinity();
  double best_l2 = options.l2_grid.back();
  for (double l2 : options.l2_grid) {
    double loglik = 0.0;
    std::size_t scored = 0;
    for (std::size_t k = 0; k < options.cv_folds; ++k) {
      if (test_rows[k].empty()) continue;
      std::vector<int> y_train;
      for (auto i : train_rows[k]) y_train.push_back(labels[i]);
      auto pos = std::count(y_train.begin(), y_train.end(), 1);
      if (pos == 0 || pos == static_cast<std::ptrdiff_t>(y_train.size())) continue;
      auto model = fit_logreg(select_rows(features, train_rows[k]), y_train, l2, options);
      for (auto i : test_rows[k]) {
        double z = model.logit(row_vector(features, static_cast<Eigen::Index>(i)));
        loglik += labels[i] ? -softplus(-z) : -softplus(z);
        ++scored;
      }
    }
    if (scored == 0) continue;
    double score = loglik / static_cast<double>(scored);
    if (score > best_score) {
      best_score = score;
      best_l2 = l2;
    }
  }
  return fit_logreg(features, labels, best_l2, options);
}

double predict_proba(const SentimentModel& model, std::string_view text) {
  return model.model.predict(featurize(text, model.vocab));
}

std::vector<std::size_t> sample_rows(std::size_t row_count, std::size_t sample_size,
                                     std::uint64_t seed) {
  std::vector<std::size_t> rows(row_count);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (rows.size() > sample_size) {
    Rng rng(substream_seed(seed, "sentiment-sample"));
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(sample_size);
    std::sort(rows.begin(), rows.end());
  }
  return rows;
}

SentimentModel train_sentiment_model(std::span<const LabeledDocument> corpus,
                                     const SentimentTrainOptions& options) {
  auto rows = sample_rows(corpus.size(), options.sample_size, options.seed);
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (auto i : rows) {
    texts.push_back(corpus[i].text);
    labels.push_back(corpus[i].positive ? 1 : 0);
  }
  SentimentModel out;
  out.vocab = build_vocabulary(texts, options.max_features, options.banned_prefixes);
  auto x = featurize_corpus(texts, out.vocab);
  auto logreg = options.logreg;
  logreg.seed = substream_seed(options.seed, "sentiment-cv");
  out.model = train_logreg(x, labels, logreg);
  out.sample_size = rows.size();
  out.seed = options.seed;
  return out;
}

std::vector<LabeledDocument> read_corpus(std::istream& in) {
  std::vector<LabeledDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    std::string label = line.substr(0, tab);
    LabeledDocument doc;
    if (label == "+1" || label == "1") {
      doc.positive = true;
    } else if (label == "-1" || label == "0") {
      doc.positive = false;
    } else {
      throw ParseError(line_no, "label must be +1, -1, 1 or 0");
    }
    if (tab != std::string::npos) doc.text = unescape_text(line.substr(tab + 1));
    docs.push_back(std::move(doc));
  }
  return docs;
}

CalibrationMap platt_scale(std::span<const double> raw_scores, std::span<const int> labels) {
  if (raw_scores.size() != labels.size()) throw Error("score and label counts differ");
  check_labels(labels, raw_scores.size());
  const double n = static_cast<double>(raw_scores.size());
  double mean = 0.0, prior = 0.0;
  for (std::size_t i = 0; i < raw_scores.size(); ++i) {
    if (!std::isfinite(raw_scores[i])) throw Error("non-finite score");
    mean += raw_scores[i];
    prior += labels[i];
  }
  mean /= n;
  prior /= n;
  double var = 0.0;
  for (double s : raw_scores) var += (s - mean) * (s - mean);
  double sd = std::sqrt(var / n);
  double prior_logit = std::log(prior / (1.0 - prior));
  if (!(sd > 0.0)) {
    // Slope is unidentifiable; keep a unit slope centred on the constant score.
    return {1.0, prior_logit - mean};
  }

  // Newton on standardized scores; a weak ridge on the slope keeps separable
  // data finite.
  constexpr double kRidge = 1e-3;
  double a = 0.0, b = prior_logit;
  auto loss = [&](double a_, double b_) {
    double l = 0.0;
    for (std::size_t i = 0; i < raw_scores.size(); ++i) {
      double z = a_ * (raw_scores[i] - mean) / sd + b_;
      l += softplus(z) - labels[i] * z;
    }
    return l / n + 0.5 * kRidge * a_ * a_;
  };
  double f = loss(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = kRidge * a, gb = 0.0, haa = kRidge, hab = 0.0, hbb = 0.0;
    for (std::size_t i = 0; i < raw_scores.size(); ++i) {
      double t = (raw_scores[i] - mean) / sd;
      double s = logistic(a * t + b);
      double r = (s - labels[i]) / n;
      double c = s * (1.0 - s) / n;
      ga += r * t;
      gb += r;
      haa += c * t * t;
      hab += c * t;
      hbb += c;
    }
    if (std::hypot(ga, gb) < 1e-12) break;
    double det = haa * hbb - hab * hab;
    double da, db;
    if (det > 0.0) {
      da = -(hbb * ga - hab * gb) / det;
      db = -(haa * gb - hab * ga) / det;
    } else {
      da = -ga;
      db = -gb;
    }
    double step = 1.0;
    bool ok = false;
    for (int k = 0; k < 60; ++k) {
      double fc = loss(a + step * da, b + step * db);
      if (fc <= f + 1e-4 * step * (ga * da + gb * db)) {
        a += step * da;
        b += step * db;
        f = fc;
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
  }
  if (a == 0.0) a = std::numeric_limits<double>::min();
  return {a / sd, b - a * mean / sd};
}

double agreement_probability(double q_u, double q_v) {
  if (!(q_u >= 0.0 && q_u <= 1.0 && q_v >= 0.0 && q_v <= 1.0)) {
    throw Error("probabilities must lie in [0,1]");
  }
  return q_u * q_v + (1.0 - q_u) * (1.0 - q_v);
}

double edge_agreement(std::span<const double> q_u, std::span<const double> q_v) {
  if (q_u.empty()) throw Error("no co-voted bills");
  if (q_u.size() != q_v.size()) throw Error("per-bill probability lists differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < q_u.size(); ++i) total += agreement_probability(q_u[i], q_v[i]);
  return total / static_cast<double>(q_u.size());
}

std::vector<SpeechScore> read_speech_scores(std::istream& in) {
  std::vector<SpeechScore> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (auto pos = line.find('\t'); ; pos = line.find('\t', start)) {
      cols.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (cols.size() != 4) throw ParseError(line_no, "expected 4 tab-separated columns");
    SpeechScore s;
    s.speaker = cols[0];
    s.bill = cols[1];
    try {
      s.raw_score = std::stod(cols[2]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "invalid score '" + cols[2] + "'");
    }
    const auto& v = cols[3];
    if (v == "Y" || v == "+1" || v == "1") {
      s.vote_yes = true;
    } else if (v == "N" || v == "-1" || v == "0") {
      s.vote_yes = false;
    } else {
      throw ParseError(line_no, "vote must be Y, N, +1, -1, 1 or 0");
    }
    out.push_back(std::move(s));
  }
  return out;
}

SignedGraph build_agreement_graph(std::span<const SpeechScore> speeches,
                                  const CalibrationMap& calibration) {
  struct Stance {
    double q_sum = 0.0;
    std::size_t speeches = 0;
    std::size_t yes = 0;
  };
  std::map<std::string, std::map<std::string, Stance>> by_bill;  // bill -> speaker -> stance
  std::map<std::string, NodeId> ids;
  for (const auto& s : speeches) {
    auto& st = by_bill[s.bill][s.speaker];
    st.q_sum += calibration(s.raw_score);
    ++st.speeches;
    st.yes += s.vote_yes ? 1 : 0;
    ids.emplace(s.speaker, 0);
  }
  std::vector<std::string> labels;
  for (auto& [name, id] : ids) {
    id = static_cast<NodeId>(labels.size());
    labels.push_back(name);
  }
  struct PairStats {
    std::size_t bills = 0;
    std::size_t agree = 0;
    double agreement_sum = 0.0;
  };
  std::map<std::pair<NodeId, NodeId>, PairStats> pairs;
  for (const auto& [bill, stances] : by_bill) {
    for (auto a = stances.begin(); a != stances.end(); ++a) {
      double qa = a->second.q_sum / static_cast<double>(a->second.speeches);
      bool va = 2 * a->second.yes >= a->second.speeches;
      for (auto b = std::next(a); b != stances.end(); ++b) {
        double qb = b->second.q_sum / static_cast<double>(b->second.speeches);
        bool vb = 2 * b->second.yes >= b->second.speeches;
        auto& ps = pairs[{ids.at(a->first), ids.at(b->first)}];
        ++ps.bills;
        ps.agree += va == vb ? 1 : 0;
        ps.agreement_sum += agreement_probability(qa, qb);
      }
    }
  }
  std::vector<SignedEdge> edges;
  for (const auto& [key, ps] : pairs) {
    SignedEdge e;
    e.source = key.first;
    e.target = key.second;
    e.sign = sign_from_bool(2 * ps.agree >= ps.bills);
    e.p = ps.agreement_sum / static_cast<double>(ps.bills);
    edges.push_back(std::move(e));
  }
  const std::size_t node_count = labels.size();
  return SignedGraph(node_count, false, std::move(edges), std::move(labels));
}

std::vector<double> mutual_information(const FeatureMatrix& features, std::span<const int> labels) {
  if (labels.size() != static_cast<std::size_t>(features.rows())) {
    throw Error("label count does not match feature rows");
  }
  const auto d = static_cast<std::size_t>(features.cols());
  const double n = static_cast<double>(labels.size());
  std::vector<double> present_pos(d, 0.0), present(d, 0.0);
  double pos = 0.0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    int y = labels[static_cast<std::size_t>(i)];
    pos += y;
    for (FeatureMatrix::InnerIterator it(features, i); it; ++it) {
      if (it.value() > 0.0) {
        auto c = static_cast<std::size_t>(it.col());
        present[c] += 1.0;
        present_pos[c] += y;
      }
    }
  }
  std::vector<double> mi(d, 0.0);
  if (n == 0.0) return mi;
  auto term = [n](double joint, double fx, double fy) {
    if (joint <= 0.0) return 0.0;
    return joint / n * std::log2(joint * n / (fx * fy));
  };
  for (std::size_t c = 0; c < d; ++c) {
    double n11 = present_pos[c];
    double n10 = present[c] - n11;
    double n01 = pos - n11;
    double n00 = n - present[c] - n01;
    double f1 = present[c], f0 = n - present[c];
    double v = term(n11, f1, pos) + term(n10, f1, n - pos) + term(n01, f0, pos) +
               term(n00, f0, n - pos);
    mi[c] = std::max(0.0, v);
  }
  return mi;
}

std::vector<std::size_t> rank_features_mi(const FeatureMatrix& features,
                                          std::span<const int> labels) {
  auto mi = mutual_information(features, labels);
  std::vector<std::size_t> order(mi.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mi[a] > mi[b]; });
  return order;
}

std::vector<std::size_t> drop_top_features(std::size_t feature_count, std::size_t m,
                                           std::span<const std::size_t> ranking) {
  if (m > feature_count) throw Error("cannot drop more features than exist");
  if (ranking.size() != feature_count) throw Error("ranking does not cover every feature");
  std::vector<char> dropped(feature_count, 0);
  for (std::size_t k = 0; k < m; ++k) dropped.at(ranking[k]) = 1;
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < feature_count; ++c) {
    if (!dropped[c]) kept.push_back(c);
  }
  return kept;
}

FeatureMatrix select_columns(const FeatureMatrix& features, std::span<const std::size_t> kept) {
  std::vector<std::ptrdiff_t> new_col(static_cast<std::size_t>(features.cols()), -1);
  for (std::size_t k = 0; k < kept.size(); ++k) new_col.at(kept[k]) = static_cast<std::ptrdiff_t>(k);
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (FeatureMatrix::InnerIterator it(features, i); it; ++it) {
      auto c = new_col[static_cast<std::size_t>(it.col())];
      if (c >= 0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(c), it.value());
    }
  }
  FeatureMatrix out(features.rows(), static_cast<Eigen::Index>(kept.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Vocabulary restrict_vocabulary(const Vocabulary& vocab, std::span<const std::size_t> kept) {
  std::vector<std::string> terms;
  terms.reserve(kept.size());
  for (auto k : kept) terms.push_back(vocab.terms().at(k));
  return Vocabulary(std::move(terms));
}

SignedGraph attach_synthetic_comments(const SignedGraph& graph, const SyntheticTextParams& params,
                                      std::uint64_t rng_seed) {
  if (params.informative_terms == 0 || params.neutral_terms == 0) {
    throw Error("synthetic text needs informative and neutral terms");
  }
  Rng rng(rng_seed);
  const std::size_t k = params.informative_terms;
  std::vector<double> toward_pos(k), toward_neg(k);
  for (std::size_t i = 0; i < k; ++i) {
    double strength = 0.9 * (1.0 - static_cast<double>(i) / static_cast<double>(k));
    double polarity = i % 2 == 0 ? 1.0 : -1.0;
    toward_pos[i] = 1.0 + polarity * strength;
    toward_neg[i] = 1.0 - polarity * strength;
  }
  std::discrete_distribution<std::size_t> pick_pos(toward_pos.begin(), toward_pos.end());
  std::discrete_distribution<std::size_t> pick_neg(toward_neg.begin(), toward_neg.end());
  std::uniform_int_distribution<std::size_t> pick_neutral(0, params.neutral_terms - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::poisson_distribution<int> extra(std::max(0.0, params.mean_length - 1.0));
  static const char* kPositiveWords[] = {"support", "supporting", "strong support"};
  static const char* kNegativeWords[] = {"oppose", "opposed", "opposing"};

  auto edges = graph.edges();
  for (auto& e : edges) {
    auto truth = truth_of(e);
    bool positive = truth ? *truth : unif(rng) < 0.5;
    std::string text;
    if (unif(rng) < params.label_word_rate) {
      auto w = static_cast<std::size_t>(unif(rng) * 3.0) % 3;
      text = positive ? kPositiveWords[w] : kNegativeWords[w];
    }
    int length = 1 + extra(rng);
    for (int t = 0; t < length; ++t) {
      if (!text.empty()) text += ' ';
      if (unif(rng) < params.informative_rate) {
        text += "cue" + std::to_string(positive ? pick_pos(rng) : pick_neg(rng));
      } else {
        text += "word" + std::to_string(pick_neutral(rng));
      }
    }
    e.text = std::move(text);
  }
  return SignedGraph(graph.node_count(), graph.directed(), std::move(edges), graph.labels());
}

}  // namespace signet
