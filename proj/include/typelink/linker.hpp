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

// Typed entity scoring:
//
//   s(e) = P_Link(e|m) * (1 - beta + beta * prod_i (1 - alpha_i + alpha_i * P_i*(t_i(e) | m, D)))
//
// where P_i* pools the token beliefs of axis i over the mention span. Each
// mention is scored independently of the others.

#ifndef TYPELINK_LINKER_HPP_
#define TYPELINK_LINKER_HPP_

#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/evalcore.hpp"
#include "typelink/kg.hpp"
#include "typelink/typeclf.hpp"
#include "typelink/typesys.hpp"

namespace typelink {

enum class Pooling { kMax, kProduct };

inline Pooling parse_pooling(const std::string& s) {
  if (s == "max") return Pooling::kMax;
  if (s == "product") return Pooling::kProduct;
  throw Error(ErrorCode::kInvalidArgument, "unknown pooling '" + s + "' (expected max or product)");
}

// Per axis, elementwise max (or product) of token distributions over [start, end).
inline std::vector<std::vector<double>> pool_mention_beliefs(const BeliefSequence& beliefs, std::size_t start,
                                                             std::size_t end, Pooling pooling = Pooling::kMax) {
  if (start >= end) throw Error(ErrorCode::kInvalidArgument, "cannot pool an empty span");
  if (end > beliefs.size()) throw Error(ErrorCode::kInvalidArgument, "span lies outside the document");
  std::vector<std::vector<double>> out = beliefs[start];
  for (std::size_t t = start + 1; t < end; ++t) {
    for (std::size_t a = 0; a < out.size(); ++a) {
      for (std::size_t c = 0; c < out[a].size(); ++c) {
        const double v = beliefs[t][a][c];
        out[a][c] = pooling == Pooling::kMax ? std::max(out[a][c], v) : out[a][c] * v;
      }
    }
  }
  return out;
}

struct SmoothingParams {
  std::vector<double> alpha;  // per axis
  double beta = 0.9;

  static SmoothingParams defaults(std::size_t axes) { return {std::vector<double>(axes, 0.9), 0.9}; }
  // alpha = beta = 1: score = p_link * prod of pooled type beliefs.
  static SmoothingParams pure_product(std::size_t axes) { return {std::vector<double>(axes, 1.0), 1.0}; }
};

inline void validate_params(const SmoothingParams& p) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(p.beta)) throw Error(ErrorCode::kInvalidArgument, "beta must lie in [0, 1]");
  for (double a : p.alpha) {
    if (!in_unit(a)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
}

inline nlohmann::json params_to_json(const SmoothingParams& p) { return {{"alpha", p.alpha}, {"beta", p.beta}}; }

inline SmoothingParams params_from_json(const nlohmann::json& j) {
  SmoothingParams p;
  try {
    p.alpha = j.at("alpha").get<std::vector<double>>();
    p.beta = j.at("beta").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad smoothing params: ") + e.what());
  }
  validate_params(p);
  return p;
}

inline void save_params(const std::string& path, const SmoothingParams& p) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path, path);
  out << params_to_json(p).dump(2) << '\n';
}

inline SmoothingParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path, path);
  try {
    return params_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what(), path);
  }
}

// Score from a link probability, the entity's label per axis and pooled beliefs.
inline double entity_score(double p_link, std::span<const std::size_t> labels,
                           const std::vector<std::vector<double>>& pooled, const SmoothingParams& params) {
  if (labels.size() != pooled.size() || params.alpha.size() != pooled.size()) {
    throw Error(ErrorCode::kInvalidArgument, "axis count mismatch between labels, beliefs and params");
  }
  double product = 1.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    product *= 1.0 - params.alpha[i] + params.alpha[i] * pooled[i][labels[i]];
  }
  return p_link * (1.0 - params.beta + params.beta * product);
}

// Score of entity `e` for mention surface `surface`; `e` must be a candidate.
inline double entity_score(EntityId e, const std::vector<std::vector<double>>& pooled, const std::string& surface,
                           const LinkStats& stats, const TypeLabeler& labeler, const SmoothingParams& params) {
  for (const auto& c : stats.candidates(surface)) {
    if (c.entity == e) {
      const auto labels = labeler.labels(labeler.graph().index_of(e));
      return entity_score(c.p_link, labels, pooled, params);
    }
  }
  throw Error(ErrorCode::kNotFound, "entity " + std::to_string(raw(e)) + " is not a candidate of '" + surface + "'");
}

struct ScoredEntity {
  EntityId entity;
  double score;
};

struct LinkDecision {
  MentionRef ref;
  std::vector<ScoredEntity> ranked;  // score desc, id asc
  EntityId chosen;
};

inline bool scores_before(const ScoredEntity& a, const ScoredEntity& b) {
  if (a.score != b.score) return a.score > b.score;
  return raw(a.entity) < raw(b.entity);
}

inline LinkDecision decide(const ResolvedMention& r, const std::vector<std::vector<double>>& pooled,
                           const TypeLabeler& labeler, const SmoothingParams& params) {
  LinkDecision d;
  d.ref = r.ref;
  for (const auto& c : r.candidates) {
    const auto labels = labeler.labels(c.index);
    d.ranked.push_back({c.entity, entity_score(c.p_link, labels, pooled, params)});
  }
  std::sort(d.ranked.begin(), d.ranked.end(), scores_before);
  d.chosen = d.ranked.front().entity;
  return d;
}

// Beliefs for every document of a corpus.
inline std::vector<BeliefSequence> corpus_beliefs(const BeliefModel& model, const AnnotatedCorpus& corpus,
                                                  unsigned workers = 1) {
  std::vector<BeliefSequence> out(corpus.documents.size());
  parallel_for(out.size(), workers, [&](std::size_t d) { out[d] = model.predict(corpus.documents[d].tokens); });
  return out;
}

// Mention tokens one-hot on the gold entity's types; other tokens uniform.
inline std::vector<BeliefSequence> gold_type_beliefs(const AnnotatedCorpus& corpus, const TypeLabeler& labeler) {
  std::vector<BeliefSequence> out;
  for (const auto& doc : corpus.documents) {
    BeliefSequence seq(doc.tokens.size());
    for (auto& tok : seq) {
      for (std::size_t a = 0; a < labeler.axis_count(); ++a) {
        const std::size_t n = labeler.system().axes[a].type_count();
        tok.emplace_back(n, 1.0 / static_cast<double>(n));
      }
    }
    for (const auto& m : doc.mentions) {
      const auto labels = labeler.labels(labeler.graph().index_of(m.gold));
      for (std::size_t t = m.start; t < m.end; ++t) {
        for (std::size_t a = 0; a < labels.size(); ++a) {
          std::fill(seq[t][a].begin(), seq[t][a].end(), 0.0);
          seq[t][a][labels[a]] = 1.0;
        }
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

struct LinkOptions {
  Pooling pooling = Pooling::kMax;
  unsigned workers = 1;
};

// One decision per mention of `set`; unlinkable mentions get nullopt.
inline std::vector<std::optional<LinkDecision>> link(const EvalSet& set, const std::vector<BeliefSequence>& beliefs,
                                                     const TypeLabeler& labeler, const SmoothingParams& params,
                                                     const LinkOptions& options = {}) {
  validate_params(params);
  if (params.alpha.size() != labeler.axis_count()) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing params have " + std::to_string(params.alpha.size()) +
                                                 " alphas for " + std::to_string(labeler.axis_count()) + " axes");
  }
  std::vector<std::optional<LinkDecision>> out(set.size());
  parallel_for(set.size(), options.workers, [&](std::size_t i) {
    const auto& r = set.mentions()[i];
    if (!r.linkable()) return;
    const auto& seq = beliefs.at(r.ref.doc);
    out[i] = decide(r, pool_mention_beliefs(seq, r.span_start, r.span_end, options.pooling), labeler, params);
  });
  return out;
}

// Links the mentions of a single document with `model`.
inline std::vector<LinkDecision> link(const Document& document, const BeliefModel& model, const LinkStats& stats,
                                      const TypeLabeler& labeler, const SmoothingParams& params,
                                      const LinkOptions& options = {}) {
  AnnotatedCorpus one;
  one.documents.push_back(document);
  const EvalSet set = EvalSet::build(one, stats, labeler.graph());
  std::vector<BeliefSequence> beliefs = {model.predict(document.tokens)};
  std::vector<LinkDecision> out;
  for (auto& d : link(set, beliefs, labeler, params, options)) {
    if (d) out.push_back(std::move(*d));
  }
  return out;
}

inline Predictions decision_predictions(const std::vector<std::optional<LinkDecision>>& decisions) {
  Predictions out;
  out.reserve(decisions.size());
  for (const auto& d : decisions) out.push_back(d ? std::optional<EntityId>(d->chosen) : std::nullopt);
  return out;
}

struct SmoothingGrid {
  std::vector<double> alpha = {0.0, 0.25, 0.5, 0.75, 0.9, 1.0};
  std::vector<double> beta = {0.0, 0.25, 0.5, 0.75, 0.9, 1.0};
};

struct FitResult {
  SmoothingParams params;
  Accuracy accuracy;
};

// Exhaustive scan, beta outer and alpha inner; alpha is shared by all axes.
// The first grid point reaching the best accuracy wins.
inline FitResult fit_smoothing(const EvalSet& set, const std::vector<BeliefSequence>& beliefs,
                               const TypeLabeler& labeler, const SmoothingGrid& grid, const LinkOptions& options = {}) {
  if (grid.alpha.empty() || grid.beta.empty()) throw Error(ErrorCode::kInvalidArgument, "smoothing grid is empty");
  if (set.linkable_count() == 0) throw Error(ErrorCode::kInvalidArgument, "validation set has no linkable mention");
  std::optional<FitResult> best;
  for (double beta : grid.beta) {
    for (double alpha : grid.alpha) {
      SmoothingParams p{std::vector<double>(labeler.axis_count(), alpha), beta};
      const Accuracy acc = system_accuracy(decision_predictions(link(set, beliefs, labeler, p, options)), set);
      if (!best || acc.hits > best->accuracy.hits) best = FitResult{p, acc};
    }
  }
  return *best;
}

// One JSON line per decision: mention ref, chosen entity and top-5 scores.
inline void write_decisions(std::ostream& out, const AnnotatedCorpus& corpus,
                            const std::vector<std::optional<LinkDecision>>& decisions) {
  for (const auto& d : decisions) {
    if (!d) continue;
    nlohmann::json row;
    row["doc_id"] = corpus.documents[d->ref.doc].doc_id;
    row["mention"] = d->ref.mention;
    row["entity"] = raw(d->chosen);
    nlohmann::json top = nlohmann::json::array();
    for (std::size_t k = 0; k < d->ranked.size() && k < 5; ++k) {
      top.push_back({{"entity", raw(d->ranked[k].entity)}, {"score", d->ranked[k].score}});
    }
    row["top"] = std::move(top);
    out << row.dump() << '\n';
  }
}

}  // namespace typelink

#endif  // TYPELINK_LINKER_HPP_
