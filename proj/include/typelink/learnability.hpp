// Copyright 2026 The Typelink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Learnability of a relation: how well a cheap text-window classifier predicts
// membership of a mention's gold entity from the 10 words on each side of the
// mention, measured as held-out ROC AUC and averaged over several seeded runs.
// A system's learnability is the mean over its axes.

#ifndef TYPELINK_LEARNABILITY_HPP_
#define TYPELINK_LEARNABILITY_HPP_

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/kg.hpp"
#include "typelink/typesys.hpp"

namespace typelink {

inline constexpr std::size_t kContextWords = 10;
inline constexpr std::size_t kWindowLength = 2 * kContextWords;

struct WindowSample {
  std::array<std::uint32_t, kWindowLength> context{};
  bool label = false;
};

// Context token ids around every mention of the corpus, in corpus order.
inline std::vector<std::array<std::uint32_t, kWindowLength>> mention_windows(const AnnotatedCorpus& corpus,
                                                                              const Vocabulary& vocab) {
  std::vector<std::array<std::uint32_t, kWindowLength>> out;
  for (const auto& doc : corpus.documents) {
    for (const auto& m : doc.mentions) {
      std::array<std::uint32_t, kWindowLength> w;
      w.fill(Vocabulary::kPad);
      for (std::size_t k = 0; k < kContextWords; ++k) {
        // Left side is stored nearest-last.
        if (m.start >= kContextWords - k) w[k] = vocab.lookup(doc.tokens[m.start - (kContextWords - k)]);
        std::size_t right = m.end + k;
        if (right < doc.tokens.size()) w[kContextWords + k] = vocab.lookup(doc.tokens[right]);
      }
      out.push_back(w);
    }
  }
  return out;
}

// Gold-entity membership flags for every mention, in corpus order.
inline std::vector<bool> mention_labels(const AnnotatedCorpus& corpus, const KnowledgeGraph& graph,
                                        const DynamicBitset& members) {
  std::vector<bool> out;
  for (const auto& doc : corpus.documents) {
    for (const auto& m : doc.mentions) out.push_back(members.test(graph.index_of(m.gold)));
  }
  return out;
}

inline std::vector<WindowSample> build_window_dataset(const AnnotatedCorpus& corpus, const KnowledgeGraph& graph,
                                                      const Relation& relation, const Vocabulary& vocab) {
  const auto windows = mention_windows(corpus, vocab);
  const auto labels = mention_labels(corpus, graph, member_set(graph, relation));
  std::vector<WindowSample> out(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) out[i] = {windows[i], labels[i]};
  return out;
}

// ---------------------------------------------------------------------------
// ROC AUC.

// Mann-Whitney statistic with tied scores counted as half.
inline double auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (bool b : labels) positives += b ? 1 : 0;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kInvalidArgument, "auc needs at least one positive and one negative");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (1-based, tie-averaged) ranks of the positives, doubled to stay integral.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_avg_rank = static_cast<std::uint64_t>(i + 1 + j);  // (i+1 + j) / 2 * 2
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) twice_rank_sum += twice_avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = static_cast<double>(twice_rank_sum) / 2.0 - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

// ---------------------------------------------------------------------------
// Window classifier: mean of context word embeddings -> linear -> sigmoid.

struct WindowClassifierConfig {
  std::size_t embedding_dim = 5;
  double dropout = 0.5;
  std::size_t epochs = 2;
  std::size_t batch_size = 128;
  double learning_rate = 0.03;
  double init_scale = 0.1;
};

class WindowClassifier {
 public:
  WindowClassifier() = default;
  WindowClassifier(std::size_t vocab_size, std::size_t dim)
      : dim_(dim), embeddings_(vocab_size * dim, 0.0), weights_(dim, 0.0) {}

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return dim_ == 0 ? 0 : embeddings_.size() / dim_; }

  std::vector<double>& embeddings() { return embeddings_; }
  const std::vector<double>& embeddings() const { return embeddings_; }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  double& bias() { return bias_; }
  double bias() const { return bias_; }

  // Probability that the window's mention belongs to the relation.
  double score(const std::array<std::uint32_t, kWindowLength>& context) const {
    double z = bias_;
    std::vector<double> pooled = pool(context);
    for (std::size_t d = 0; d < dim_; ++d) z += weights_[d] * pooled[d];
    return sigmoid(z);
  }

  std::vector<double> pool(const std::array<std::uint32_t, kWindowLength>& context) const {
    std::vector<double> pooled(dim_, 0.0);
    for (std::uint32_t t : context) {
      const std::size_t id = t < vocab_size() ? t : Vocabulary::kUnk;
      for (std::size_t d = 0; d < dim_; ++d) pooled[d] += embeddings_[id * dim_ + d];
    }
    for (double& v : pooled) v /= static_cast<double>(kWindowLength);
    return pooled;
  }

  static double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }

  friend bool operator==(const WindowClassifier&, const WindowClassifier&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> embeddings_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

// Mini-batch Adam on log loss. Dropout masks embedding dimensions at training
// time with inverted scaling; inference is deterministic.
inline WindowClassifier train_window_classifier(std::span<const WindowSample> samples, std::size_t vocab_size,
                                                const WindowClassifierConfig& config, std::uint64_t seed) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot train on an empty dataset");
  Rng rng(seed);
  const std::size_t dim = config.embedding_dim;
  WindowClassifier model(vocab_size, dim);
  for (double& v : model.embeddings()) v = rng.uniform(-config.init_scale, config.init_scale);
  for (double& v : model.weights()) v = rng.uniform(-config.init_scale, config.init_scale);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  const double keep = 1.0 - config.dropout;
  std::vector<double> grad_w(dim);
  std::vector<double> pooled(dim);
  std::vector<double> mask(dim);
  std::map<std::uint32_t, std::vector<double>> grad_emb;
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999;
  std::vector<double> m_emb(model.embeddings().size(), 0.0), v_emb(model.embeddings().size(), 0.0);
  std::vector<double> m_w(dim, 0.0), v_w(dim, 0.0);
  double m_b = 0.0, v_b = 0.0;
  double step = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - begin);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0.0;
      grad_emb.clear();
      for (std::size_t s = begin; s < end; ++s) {
        const WindowSample& sample = samples[order[s]];
        pooled = model.pool(sample.context);
        for (std::size_t d = 0; d < dim; ++d) {
          mask[d] = keep <= 0.0 ? 0.0 : (rng.bernoulli(keep) ? 1.0 / keep : 0.0);
        }
        double z = model.bias();
        for (std::size_t d = 0; d < dim; ++d) z += model.weights()[d] * pooled[d] * mask[d];
        const double err = (WindowClassifier::sigmoid(z) - (sample.label ? 1.0 : 0.0)) * inv_batch;
        grad_b += err;
        for (std::size_t d = 0; d < dim; ++d) grad_w[d] += err * pooled[d] * mask[d];
        for (std::uint32_t t : sample.context) {
          auto& g = grad_emb[t];
          g.resize(dim, 0.0);
          for (std::size_t d = 0; d < dim; ++d) {
            g[d] += err * model.weights()[d] * mask[d] / static_cast<double>(kWindowLength);
          }
        }
      }
      ++step;
      const double lr = config.learning_rate * std::sqrt(1.0 - std::pow(kBeta2, step)) / (1.0 - std::pow(kBeta1, step));
      auto adam = [&](double& p, double g, double& m, double& v) {
        m = kBeta1 * m + (1.0 - kBeta1) * g;
        v = kBeta2 * v + (1.0 - kBeta2) * g * g;
        p -= lr * m / (std::sqrt(v) + 1e-8);
      };
      for (auto& [t, g] : grad_emb) {
        for (std::size_t d = 0; d < dim; ++d) adam(model.embeddings()[t * dim + d], g[d], m_emb[t * dim + d], v_emb[t * dim + d]);
      }
      for (std::size_t d = 0; d < dim; ++d) adam(model.weights()[d], grad_w[d], m_w[d], v_w[d]);
      adam(model.bias(), grad_b, m_b, v_b);
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Per-axis and system learnability.

struct LearnabilityConfig {
  WindowClassifierConfig classifier;
  std::size_t runs = 4;
  double holdout_fraction = 0.2;
  bool held_out = true;      // false scores the training windows themselves
  double zero_epsilon = 0.01;  // mean AUC <= 0.5 + epsilon counts as unlearnable
  unsigned workers = 0;
};

struct AxisLearnability {
  Relation relation;
  std::vector<double> run_aucs;
  double mean = 0.5;
  double std = 0.0;
  bool zero = true;
};

struct LearnabilityScore {
  std::vector<AxisLearnability> axes;
  double system = 0.0;  // mean of axis means; 0 for no axes
};

// Stable per-relation stream id, independent of pool order.
inline std::uint64_t relation_stream(const Relation& r) { return hash_string(relation_key(r)); }

// Held-out AUC of one seeded training run; 0.5 when either side lacks a class.
inline double learnability_run(std::span<const std::array<std::uint32_t, kWindowLength>> windows,
                               const std::vector<bool>& labels, std::size_t vocab_size,
                               const LearnabilityConfig& config, std::uint64_t seed) {
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(seed, {1}));
  split_rng.shuffle(order);
  std::size_t n_test = config.held_out
                           ? static_cast<std::size_t>(std::round(config.holdout_fraction * static_cast<double>(order.size())))
                           : 0;
  std::vector<WindowSample> train;
  std::vector<std::size_t> test;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_test) {
      test.push_back(order[i]);
    } else {
      train.push_back({windows[order[i]], labels[order[i]]});
    }
  }
  if (!config.held_out) test.assign(order.begin(), order.end());
  auto two_classes = [](const auto& flags) {
    bool pos = false, neg = false;
    for (bool f : flags) (f ? pos : neg) = true;
    return pos && neg;
  };
  std::vector<bool> train_labels;
  for (const auto& s : train) train_labels.push_back(s.label);
  std::vector<bool> test_labels;
  for (std::size_t i : test) test_labels.push_back(labels[i]);
  if (train.empty() || !two_classes(train_labels) || !two_classes(test_labels)) return 0.5;
  WindowClassifier model = train_window_classifier(train, vocab_size, config.classifier, derive_seed(seed, {2}));
  std::vector<double> scores;
  scores.reserve(test.size());
  for (std::size_t i : test) scores.push_back(model.score(windows[i]));
  return auc(scores, test_labels);
}

inline void summarize_runs(AxisLearnability& axis, double zero_epsilon) {
  const double n = static_cast<double>(axis.run_aucs.size());
  double sum = 0.0;
  for (double a : axis.run_aucs) sum += a;
  axis.mean = axis.run_aucs.empty() ? 0.5 : sum / n;
  double sq = 0.0;
  for (double a : axis.run_aucs) sq += (a - axis.mean) * (a - axis.mean);
  axis.std = axis.run_aucs.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  axis.zero = axis.mean <= 0.5 + zero_epsilon;
}

inline double system_learnability(std::span<const AxisLearnability> axes) {
  if (axes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& a : axes) sum += a.mean;
  return sum / static_cast<double>(axes.size());
}

// Scores every relation; axes train in parallel with per-(relation, run)
// seeds, so the result does not depend on the worker count.
inline LearnabilityScore learnability(std::span<const Relation> relations, const AnnotatedCorpus& corpus,
                                      const MembershipCache& cache, const LearnabilityConfig& config,
                                      std::uint64_t master_seed) {
  const Vocabulary vocab = Vocabulary::from_corpus(corpus);
  const auto windows = mention_windows(corpus, vocab);
  LearnabilityScore score;
  score.axes.resize(relations.size());
  const std::size_t jobs = relations.size() * config.runs;
  std::vector<double> results(jobs, 0.5);
  std::vector<std::vector<bool>> labels(relations.size());
  parallel_for(relations.size(), config.workers, [&](std::size_t a) {
    labels[a] = mention_labels(corpus, cache.graph(), *cache.get(relations[a]));
  });
  parallel_for(jobs, config.workers, [&](std::size_t job) {
    const std::size_t a = job / config.runs;
    const std::size_t run = job % config.runs;
    const std::uint64_t seed = derive_seed(master_seed, {relation_stream(relations[a]), run});
    results[job] = learnability_run(windows, labels[a], vocab.size(), config, seed);
  });
  for (std::size_t a = 0; a < relations.size(); ++a) {
    AxisLearnability& axis = score.axes[a];
    axis.relation = relations[a];
    axis.run_aucs.assign(results.begin() + static_cast<std::ptrdiff_t>(a * config.runs),
                         results.begin() + static_cast<std::ptrdiff_t>((a + 1) * config.runs));
    summarize_runs(axis, config.zero_epsilon);
  }
  score.system = system_learnability(score.axes);
  return score;
}

// ---------------------------------------------------------------------------
// Report grouped by membership edge kind.

struct LearnabilityGroup {
  std::string edge_kind;
  std::size_t axes = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;                                // spread of axis means within the group
  std::vector<std::pair<double, double>> scatter;      // (axis mean, axis run std)
};

inline std::vector<LearnabilityGroup> learnability_report(std::span<const AxisLearnability> axes) {
  std::map<std::string, std::vector<const AxisLearnability*>> by_kind;
  for (const auto& a : axes) by_kind[a.relation.edge].push_back(&a);
  std::vector<LearnabilityGroup> out;
  for (const auto& [kind, members] : by_kind) {
    LearnabilityGroup g;
    g.edge_kind = kind;
    g.axes = members.size();
    for (const auto* a : members) {
      g.auc_mean += a->mean;
      g.scatter.emplace_back(a->mean, a->std);
    }
    g.auc_mean /= static_cast<double>(members.size());
    double sq = 0.0;
    for (const auto* a : members) sq += (a->mean - g.auc_mean) * (a->mean - g.auc_mean);
    g.auc_std = members.size() > 1 ? std::sqrt(sq / static_cast<double>(members.size() - 1)) : 0.0;
    out.push_back(std::move(g));
  }
  return out;
}

// Per-axis TSV: axis (root id), edge_kind, auc_mean, auc_std.
inline void write_learnability_tsv(std::ostream& out, std::span<const AxisLearnability> axes) {
  out << "axis\tedge_kind\tauc_mean\tauc_std\n";
  for (const auto& a : axes) {
    out << raw(a.relation.root) << '\t' << a.relation.edge << '\t' << format_double(a.mean) << '\t'
        << format_double(a.std) << '\n';
  }
}

inline std::vector<AxisLearnability> read_learnability_tsv(std::istream& in, const std::string& name,
                                                           double zero_epsilon = 0.01) {
  std::vector<AxisLearnability> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#' || line.rfind("axis\t", 0) == 0) continue;
    auto f = split(line, '\t');
    std::uint64_t root = 0;
    AxisLearnability a;
    if (f.size() != 4 || !parse_number(f[0], root) || !valid_kind_name(f[1]) || !parse_number(f[2], a.mean) ||
        !parse_number(f[3], a.std)) {
      throw Error(ErrorCode::kParse, "malformed learnability row", name + ":" + std::to_string(lineno));
    }
    a.relation = make_relation(entity(root), f[1]);
    a.zero = a.mean <= 0.5 + zero_epsilon;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace typelink

#endif  // TYPELINK_LEARNABILITY_HPP_
