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

// Per-token multi-axis type classifier.
//
//   x_j  = [emb(w_{j-r}); ...; emb(w_{j+r})]      (PAD outside the document)
//   h_j  = tanh(W1 x_j + b1)
//   P_i(. | w_j, D) = softmax(W2_i h_j + b2_i)      one head per axis
//
// Loss is the summed per-axis negative log likelihood over labeled tokens
// only. All parameters live in one flat float64 vector, optimized with Adam.

#ifndef TYPELINK_TYPECLF_HPP_
#define TYPELINK_TYPECLF_HPP_

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/evalcore.hpp"
#include "typelink/kg.hpp"
#include "typelink/typesys.hpp"

namespace typelink {

inline constexpr int kMissingLabel = -1;

// labels[doc][token][axis]: type id or kMissingLabel.
struct TokenLabeling {
  std::vector<std::size_t> type_counts;  // per axis
  std::vector<std::vector<std::vector<int>>> labels;

  std::size_t labeled_tokens() const {
    std::size_t n = 0;
    for (const auto& doc : labels) {
      for (const auto& tok : doc) {
        for (int l : tok) {
          if (l != kMissingLabel) {
            ++n;
            break;
          }
        }
      }
    }
    return n;
  }
};

// Mention tokens get the gold entity's label on every axis.
inline TokenLabeling label_corpus(const AnnotatedCorpus& corpus, const TypeLabeler& labeler) {
  TokenLabeling out;
  const std::size_t k = labeler.axis_count();
  for (std::size_t a = 0; a < k; ++a) out.type_counts.push_back(labeler.system().axes[a].type_count());
  for (const auto& doc : corpus.documents) {
    std::vector<std::vector<int>> rows(doc.tokens.size(), std::vector<int>(k, kMissingLabel));
    if (k > 0) {
      for (const auto& m : doc.mentions) {
        const EntityIndex gold = labeler.graph().index_of(m.gold);
        for (std::size_t t = m.start; t < m.end; ++t) {
          for (std::size_t a = 0; a < k; ++a) rows[t][a] = static_cast<int>(labeler.label(a, gold));
        }
      }
    }
    out.labels.push_back(std::move(rows));
  }
  return out;
}

inline TokenLabeling label_corpus(const AnnotatedCorpus& corpus, const KnowledgeGraph& graph,
                                  const TypeSystem& system) {
  MembershipCache cache(graph);
  return label_corpus(corpus, TypeLabeler(cache, system));
}

struct AugmentConfig {
  double unk = 0.0;
  double decapitalize = 0.0;
  double strip_s = 0.0;
};

// Independent per-token edits. Order: strip trailing s, decapitalize, UNK.
inline std::vector<std::string> augment(const std::vector<std::string>& tokens, const AugmentConfig& config, Rng& rng) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::string t : tokens) {
    if (rng.bernoulli(config.strip_s) && t.size() > 1 && (t.back() == 's' || t.back() == 'S')) t.pop_back();
    if (rng.bernoulli(config.decapitalize)) {
      for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (rng.bernoulli(config.unk)) t = std::string(Vocabulary::kUnkToken);
    out.push_back(std::move(t));
  }
  return out;
}

struct ModelShape {
  std::size_t dim = 32;
  std::size_t radius = 5;
  std::size_t hidden = 64;
  bool affixes = false;  // hashed 2/3-char prefix and suffix embeddings, summed into the word vector
  std::size_t affix_buckets = 4096;
};

struct TrainConfig {
  ModelShape shape;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double anneal = 0.99;
  std::size_t anneal_every = 10000;
  AugmentConfig augment;
  std::size_t epochs = 10;
  std::size_t batch = 32;
  double init_scale = 0.1;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

inline void validate_train_config(const TrainConfig& c) {
  for (double p : {c.augment.unk, c.augment.decapitalize, c.augment.strip_s}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "augmentation probabilities must lie in [0, 1]");
  }
  if (c.batch == 0 || c.shape.dim == 0 || c.shape.hidden == 0 || c.anneal_every == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch, dim, hidden and anneal_every must be positive");
  }
  if (!(c.lr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
}

// lr * anneal^(floor(step / anneal_every)).
inline double effective_lr(const TrainConfig& c, std::size_t step) {
  return c.lr * std::pow(c.anneal, static_cast<double>(step / c.anneal_every));
}

// Per token, per axis, a distribution over the axis's types.
using BeliefSequence = std::vector<std::vector<std::vector<double>>>;

// Anything that turns a token sequence into type beliefs.
class BeliefModel {
 public:
  virtual ~BeliefModel() = default;
  virtual BeliefSequence predict(const std::vector<std::string>& tokens) const = 0;
};

class TokenClassifier : public BeliefModel {
 public:
  TokenClassifier() = default;

  TokenClassifier(Vocabulary vocab, std::vector<std::size_t> type_counts, const ModelShape& shape)
      : vocab_(std::move(vocab)), type_counts_(std::move(type_counts)), shape_(shape) {
    layout();
    params_.assign(size_, 0.0);
  }

  // Uniform init for embeddings and W1; output layer stays zero.
  void initialize(std::uint64_t seed, double scale) {
    Rng rng(seed);
    std::fill(params_.begin(), params_.end(), 0.0);
    for (std::size_t i = off_emb_; i < off_b1_; ++i) {
      if (i >= off_w1_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(input_dim() + shape_.hidden));
        params_[i] = rng.uniform(-limit, limit);
      } else {
        params_[i] = rng.uniform(-scale, scale);
      }
    }
  }

  const Vocabulary& vocabulary() const { return vocab_; }
  const std::vector<std::size_t>& type_counts() const { return type_counts_; }
  const ModelShape& shape() const { return shape_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t axis_count() const { return type_counts_.size(); }
  std::size_t input_dim() const { return (2 * shape_.radius + 1) * shape_.dim; }
  std::size_t output_dim() const { return out_dim_; }

  struct Encoded {
    std::vector<std::uint32_t> words;
    std::vector<std::array<std::uint32_t, 4>> affixes;
  };

  Encoded encode(const std::vector<std::string>& tokens) const {
    Encoded e;
    for (const auto& t : tokens) {
      e.words.push_back(vocab_.lookup(t));
      if (shape_.affixes) {
        std::array<std::uint32_t, 4> a{};
        const std::string parts[4] = {"p" + t.substr(0, 2), "P" + t.substr(0, 3),
                                      "s" + t.substr(t.size() >= 2 ? t.size() - 2 : 0),
                                      "S" + t.substr(t.size() >= 3 ? t.size() - 3 : 0)};
        for (int k = 0; k < 4; ++k) a[k] = static_cast<std::uint32_t>(hash_string(parts[k]) % shape_.affix_buckets);
        e.affixes.push_back(a);
      }
    }
    return e;
  }

  BeliefSequence predict(const std::vector<std::string>& tokens) const override {
    Encoded e = encode(tokens);
    BeliefSequence out;
    Scratch s(*this);
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      forward(e, j, s);
      std::vector<std::vector<double>> axes;
      for (std::size_t a = 0; a < axis_count(); ++a) {
        axes.emplace_back(s.prob.begin() + static_cast<std::ptrdiff_t>(head_[a]),
                          s.prob.begin() + static_cast<std::ptrdiff_t>(head_[a] + type_counts_[a]));
      }
      out.push_back(std::move(axes));
    }
    return out;
  }

  // Summed NLL of token j; adds d(loss)/d(theta) into `grad` when non-null.
  double token_loss(const Encoded& e, std::size_t j, std::span<const int> labels, std::vector<double>* grad) const {
    Scratch s(*this);
    return token_loss(e, j, labels, grad, s);
  }

  struct Scratch {
    explicit Scratch(const TokenClassifier& m)
        : x(m.input_dim()), h(m.shape_.hidden), prob(m.out_dim_), dlogit(m.out_dim_), dz(m.shape_.hidden) {}
    std::vector<double> x, h, prob, dlogit, dz;
  };

  double token_loss(const Encoded& e, std::size_t j, std::span<const int> labels, std::vector<double>* grad,
                    Scratch& s) const {
    forward(e, j, s);
    double loss = 0.0;
    bool any = false;
    std::fill(s.dlogit.begin(), s.dlogit.end(), 0.0);
    for (std::size_t a = 0; a < axis_count(); ++a) {
      if (labels[a] == kMissingLabel) continue;
      any = true;
      const std::size_t t = head_[a] + static_cast<std::size_t>(labels[a]);
      loss -= std::log(std::max(s.prob[t], 1e-300));
      for (std::size_t c = 0; c < type_counts_[a]; ++c) s.dlogit[head_[a] + c] = s.prob[head_[a] + c];
      s.dlogit[t] -= 1.0;
    }
    if (!grad || !any) return loss;
    std::vector<double>& g = *grad;
    const std::size_t H = shape_.hidden;
    const std::size_t I = input_dim();
    std::fill(s.dz.begin(), s.dz.end(), 0.0);
    for (std::size_t o = 0; o < out_dim_; ++o) {
      const double d = s.dlogit[o];
      if (d == 0.0) continue;
      g[off_b2_ + o] += d;
      const double* w = &params_[off_w2_ + o * H];
      double* gw = &g[off_w2_ + o * H];
      for (std::size_t k = 0; k < H; ++k) {
        gw[k] += d * s.h[k];
        s.dz[k] += d * w[k];
      }
    }
    for (std::size_t k = 0; k < H; ++k) s.dz[k] *= 1.0 - s.h[k] * s.h[k];
    std::vector<double> dx(I, 0.0);
    for (std::size_t k = 0; k < H; ++k) {
      const double d = s.dz[k];
      g[off_b1_ + k] += d;
      const double* w = &params_[off_w1_ + k * I];
      double* gw = &g[off_w1_ + k * I];
      for (std::size_t i = 0; i < I; ++i) {
        gw[i] += d * s.x[i];
        dx[i] += d * w[i];
      }
    }
    const std::size_t D = shape_.dim;
    for (std::size_t p = 0; p < 2 * shape_.radius + 1; ++p) {
      const auto [word, affix] = slot(e, j, p);
      for (std::size_t c = 0; c < D; ++c) g[off_emb_ + word * D + c] += dx[p * D + c];
      if (affix) {
        for (std::uint32_t b : *affix) {
          for (std::size_t c = 0; c < D; ++c) g[off_affix_ + b * D + c] += dx[p * D + c];
        }
      }
    }
    return loss;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "typelink-token-classifier";
    j["version"] = 1;
    j["shape"] = {{"dim", shape_.dim},
                  {"radius", shape_.radius},
                  {"hidden", shape_.hidden},
                  {"affixes", shape_.affixes},
                  {"affix_buckets", shape_.affix_buckets}};
    j["type_counts"] = type_counts_;
    j["vocabulary"] = vocab_.tokens();
    j["params"] = params_;
    return j;
  }

  static TokenClassifier from_json(const nlohmann::json& j) {
    try {
      if (j.at("format").get<std::string>() != "typelink-token-classifier" || j.at("version").get<int>() != 1) {
        throw Error(ErrorCode::kParse, "unsupported model checkpoint format");
      }
      ModelShape shape;
      const auto& s = j.at("shape");
      shape.dim = s.at("dim").get<std::size_t>();
      shape.radius = s.at("radius").get<std::size_t>();
      shape.hidden = s.at("hidden").get<std::size_t>();
      shape.affixes = s.at("affixes").get<bool>();
      shape.affix_buckets = s.at("affix_buckets").get<std::size_t>();
      Vocabulary vocab;
      for (const auto& t : j.at("vocabulary").get<std::vector<std::string>>()) vocab.add(t);
      TokenClassifier m(std::move(vocab), j.at("type_counts").get<std::vector<std::size_t>>(), shape);
      auto params = j.at("params").get<std::vector<double>>();
      if (params.size() != m.params_.size()) throw Error(ErrorCode::kParse, "parameter count does not match shape");
      m.params_ = std::move(params);
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("bad model checkpoint: ") + e.what());
    }
  }

 private:
  void layout() {
    out_dim_ = 0;
    head_.clear();
    for (std::size_t c : type_counts_) {
      head_.push_back(out_dim_);
      out_dim_ += c;
    }
    const std::size_t D = shape_.dim;
    off_emb_ = 0;
    off_affix_ = off_emb_ + vocab_.size() * D;
    off_w1_ = off_affix_ + (shape_.affixes ? shape_.affix_buckets * D : 0);
    off_b1_ = off_w1_ + shape_.hidden * input_dim();
    off_w2_ = off_b1_ + shape_.hidden;
    off_b2_ = off_w2_ + out_dim_ * shape_.hidden;
    size_ = off_b2_ + out_dim_;
  }

  std::pair<std::uint32_t, const std::array<std::uint32_t, 4>*> slot(const Encoded& e, std::size_t j,
                                                                      std::size_t p) const {
    const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(j + p) - static_cast<std::ptrdiff_t>(shape_.radius);
    if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(e.words.size())) return {Vocabulary::kPad, nullptr};
    return {e.words[static_cast<std::size_t>(pos)],
            shape_.affixes ? &e.affixes[static_cast<std::size_t>(pos)] : nullptr};
  }

  void forward(const Encoded& e, std::size_t j, Scratch& s) const {
    const std::size_t D = shape_.dim;
    const std::size_t H = shape_.hidden;
    const std::size_t I = input_dim();
    for (std::size_t p = 0; p < 2 * shape_.radius + 1; ++p) {
      const auto [word, affix] = slot(e, j, p);
      for (std::size_t c = 0; c < D; ++c) {
        double v = params_[off_emb_ + word * D + c];
        if (affix) {
          for (std::uint32_t b : *affix) v += params_[off_affix_ + b * D + c];
        }
        s.x[p * D + c] = v;
      }
    }
    for (std::size_t k = 0; k < H; ++k) {
      double z = params_[off_b1_ + k];
      const double* w = &params_[off_w1_ + k * I];
      for (std::size_t i = 0; i < I; ++i) z += w[i] * s.x[i];
      s.h[k] = std::tanh(z);
    }
    for (std::size_t a = 0; a < axis_count(); ++a) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < type_counts_[a]; ++c) {
        const std::size_t o = head_[a] + c;
        double z = params_[off_b2_ + o];
        const double* w = &params_[off_w2_ + o * H];
        for (std::size_t k = 0; k < H; ++k) z += w[k] * s.h[k];
        s.prob[o] = z;
        mx = std::max(mx, z);
      }
      double sum = 0.0;
      for (std::size_t c = 0; c < type_counts_[a]; ++c) {
        s.prob[head_[a] + c] = std::exp(s.prob[head_[a] + c] - mx);
        sum += s.prob[head_[a] + c];
      }
      for (std::size_t c = 0; c < type_counts_[a]; ++c) s.prob[head_[a] + c] /= sum;
    }
  }

  Vocabulary vocab_;
  std::vector<std::size_t> type_counts_;
  ModelShape shape_;
  std::vector<std::size_t> head_;
  std::size_t out_dim_ = 0;
  std::size_t off_emb_ = 0, off_affix_ = 0, off_w1_ = 0, off_b1_ = 0, off_w2_ = 0, off_b2_ = 0, size_ = 0;
  std::vector<double> params_;
};

inline void save_model(const std::string& path, const TokenClassifier& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path, path);
  out << model.to_json().dump() << '\n';
}

inline TokenClassifier load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path, path);
  try {
    return TokenClassifier::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what(), path);
  }
}

// ---------------------------------------------------------------------------
// Training.

struct TokenExample {
  std::size_t doc = 0;
  std::size_t token = 0;
};

inline std::vector<TokenExample> labeled_examples(const TokenLabeling& labeling) {
  std::vector<TokenExample> out;
  for (std::size_t d = 0; d < labeling.labels.size(); ++d) {
    for (std::size_t t = 0; t < labeling.labels[d].size(); ++t) {
      for (int l : labeling.labels[d][t]) {
        if (l != kMissingLabel) {
          out.push_back({d, t});
          break;
        }
      }
    }
  }
  return out;
}

// Mean loss over a batch and its gradient. Gradients accumulate in fixed
// shards reduced in shard order, so the result is independent of `workers`.
inline double batch_loss_and_gradient(const TokenClassifier& model, std::span<const TokenClassifier::Encoded> docs,
                                      const TokenLabeling& labeling, std::span<const TokenExample> batch,
                                      std::vector<double>& grad, unsigned workers = 1) {
  constexpr std::size_t kShards = 4;
  const std::size_t n = model.params().size();
  std::vector<std::vector<double>> shard_grad(kShards);
  std::vector<double> shard_loss(kShards, 0.0);
  parallel_for(kShards, workers, [&](std::size_t s) {
    shard_grad[s].assign(n, 0.0);
    TokenClassifier::Scratch scratch(model);
    for (std::size_t i = s; i < batch.size(); i += kShards) {
      const auto& ex = batch[i];
      shard_loss[s] += model.token_loss(docs[ex.doc], ex.token, labeling.labels[ex.doc][ex.token], &shard_grad[s], scratch);
    }
  });
  grad.assign(n, 0.0);
  double loss = 0.0;
  const double scale = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  for (std::size_t s = 0; s < kShards; ++s) {
    loss += shard_loss[s];
    for (std::size_t p = 0; p < n; ++p) grad[p] += shard_grad[s][p];
  }
  for (double& g : grad) g *= scale;
  return loss * scale;
}

class Adam {
 public:
  Adam(std::size_t n, const TrainConfig& config) : config_(config), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    const double lr = effective_lr(config_, t_);
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.epsilon);
    }
  }

  std::size_t steps() const { return t_; }

 private:
  TrainConfig config_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

struct TrainResult {
  TokenClassifier model;
  std::vector<double> loss_curve;  // one entry per Adam step
};

inline TrainResult train(const AnnotatedCorpus& corpus, const TokenLabeling& labeling, const TrainConfig& config) {
  validate_train_config(config);
  if (labeling.labels.size() != corpus.documents.size()) {
    throw Error(ErrorCode::kInvalidArgument, "labeling does not match corpus");
  }
  std::vector<TokenExample> examples = labeled_examples(labeling);
  if (examples.empty()) throw Error(ErrorCode::kInvalidArgument, "no labeled tokens to train on");

  TrainResult result{TokenClassifier(Vocabulary::from_corpus(corpus), labeling.type_counts, config.shape), {}};
  TokenClassifier& model = result.model;
  model.initialize(derive_seed(config.seed, {1}), config.init_scale);
  Adam adam(model.params().size(), config);
  Rng order_rng(derive_seed(config.seed, {2}));
  std::vector<double> grad;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<TokenClassifier::Encoded> docs;
    docs.reserve(corpus.documents.size());
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
      Rng rng(derive_seed(config.seed, {3, epoch, d}));
      docs.push_back(model.encode(augment(corpus.documents[d].tokens, config.augment, rng)));
    }
    order_rng.shuffle(examples);
    for (std::size_t start = 0; start < examples.size(); start += config.batch) {
      const std::size_t end = std::min(examples.size(), start + config.batch);
      std::span<const TokenExample> batch(examples.data() + start, end - start);
      result.loss_curve.push_back(batch_loss_and_gradient(model, docs, labeling, batch, grad, config.workers));
      adam.step(model.params(), grad);
    }
  }
  return result;
}

// Fraction of labeled (token, axis) pairs whose argmax type is the label.
inline Accuracy token_accuracy(const BeliefModel& model, const AnnotatedCorpus& corpus, const TokenLabeling& labeling) {
  Accuracy acc;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    BeliefSequence beliefs = model.predict(corpus.documents[d].tokens);
    for (std::size_t t = 0; t < beliefs.size(); ++t) {
      for (std::size_t a = 0; a < beliefs[t].size(); ++a) {
        const int l = labeling.labels[d][t][a];
        if (l == kMissingLabel) continue;
        ++acc.total;
        const auto& p = beliefs[t][a];
        if (static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) == l) ++acc.hits;
      }
    }
  }
  return acc;
}

}  // namespace typelink

#endif  // TYPELINK_TYPECLF_HPP_
