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

// Accuracy measures over an annotated corpus: the most-linked baseline, the
// type Oracle, end-to-end system accuracy, the proxy objective J and per-type
// error analysis.
//
// Mentions whose candidate set is empty are unlinkable: they are excluded
// from every accuracy numerator and denominator and counted separately. A
// linkable mention whose gold entity is not a candidate is always an error.

#ifndef TYPELINK_EVALCORE_HPP_
#define TYPELINK_EVALCORE_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/kg.hpp"
#include "typelink/typesys.hpp"

namespace typelink {

struct Accuracy {
  std::size_t hits = 0;
  std::size_t total = 0;

  double value() const { return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total); }

  friend bool operator==(const Accuracy&, const Accuracy&) = default;
};

struct RankedCandidate {
  EntityId entity;
  EntityIndex index;
  std::uint64_t count;
  double p_link;
};

struct MentionRef {
  std::size_t doc = 0;
  std::size_t mention = 0;
  friend auto operator<=>(const MentionRef&, const MentionRef&) = default;
};

struct ResolvedMention {
  MentionRef ref;
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::string surface;
  EntityId gold;
  EntityIndex gold_index;
  std::vector<RankedCandidate> candidates;  // ranked: count desc, id asc
  std::optional<std::size_t> gold_rank;     // position of gold in candidates

  bool linkable() const { return !candidates.empty(); }
};

// Corpus mentions joined with their candidate sets and link counts.
class EvalSet {
 public:
  static EvalSet build(const AnnotatedCorpus& corpus, const LinkStats& stats, const KnowledgeGraph& graph) {
    EvalSet set;
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
      const Document& doc = corpus.documents[d];
      for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
        const Mention& m = doc.mentions[i];
        ResolvedMention r;
        r.ref = {d, i};
        r.span_start = m.start;
        r.span_end = m.end;
        r.surface = surface(doc, m);
        r.gold = m.gold;
        r.gold_index = graph.index_of(m.gold);
        if (m.candidates) {
          std::vector<LinkCount> rows;
          for (EntityId e : *m.candidates) {
            if (std::any_of(rows.begin(), rows.end(), [&](const LinkCount& lc) { return lc.entity == e; })) continue;
            rows.push_back({e, stats.count(r.surface, e)});
          }
          std::sort(rows.begin(), rows.end(), ranks_before);
          std::uint64_t sum = 0;
          for (const auto& lc : rows) sum += lc.count;
          for (const auto& lc : rows) {
            double p = sum == 0 ? 1.0 / static_cast<double>(rows.size())
                                : static_cast<double>(lc.count) / static_cast<double>(sum);
            r.candidates.push_back({lc.entity, graph.index_of(lc.entity), lc.count, p});
          }
        } else {
          for (const auto& c : stats.candidates(r.surface)) {
            r.candidates.push_back({c.entity, graph.index_of(c.entity), c.count, c.p_link});
          }
        }
        for (std::size_t k = 0; k < r.candidates.size(); ++k) {
          if (r.candidates[k].entity == r.gold) r.gold_rank = k;
        }
        set.mentions_.push_back(std::move(r));
      }
    }
    for (const auto& r : set.mentions_) (r.linkable() ? set.linkable_ : set.unlinkable_)++;
    return set;
  }

  const std::vector<ResolvedMention>& mentions() const { return mentions_; }
  std::size_t size() const { return mentions_.size(); }
  std::size_t linkable_count() const { return linkable_; }
  std::size_t unlinkable_count() const { return unlinkable_; }

  // Fraction of linkable mentions whose gold entity is a candidate.
  Accuracy gold_recall() const {
    Accuracy a;
    for (const auto& r : mentions_) {
      if (!r.linkable()) continue;
      ++a.total;
      if (r.gold_rank) ++a.hits;
    }
    return a;
  }

 private:
  std::vector<ResolvedMention> mentions_;
  std::size_t linkable_ = 0;
  std::size_t unlinkable_ = 0;
};

// Accuracy of always picking the most-linked candidate.
inline Accuracy s_greedy(const EvalSet& set) {
  Accuracy a;
  for (const auto& r : set.mentions()) {
    if (!r.linkable()) continue;
    ++a.total;
    if (r.candidates.front().entity == r.gold) ++a.hits;
  }
  return a;
}

// Oracle choice for one mention: the most-linked candidate whose full label
// tuple equals the gold entity's.
inline std::optional<EntityId> oracle_prediction(const ResolvedMention& r, const TypeLabeler& labeler) {
  for (const auto& c : r.candidates) {
    if (labeler.same_labels(c.index, r.gold_index)) return c.entity;
  }
  // Gold is not a candidate and nothing shares its labels: fall back to the
  // top candidate, which is wrong either way.
  if (r.linkable()) return r.candidates.front().entity;
  return std::nullopt;
}

// One prediction per mention of `set` (nullopt for unlinkable mentions).
using Predictions = std::vector<std::optional<EntityId>>;

inline Predictions oracle_predictions(const EvalSet& set, const TypeLabeler& labeler) {
  Predictions out;
  out.reserve(set.size());
  for (const auto& r : set.mentions()) out.push_back(oracle_prediction(r, labeler));
  return out;
}

inline Predictions greedy_predictions(const EvalSet& set) {
  Predictions out;
  for (const auto& r : set.mentions()) {
    out.push_back(r.linkable() ? std::optional<EntityId>(r.candidates.front().entity) : std::nullopt);
  }
  return out;
}

// Mean of 1[prediction == gold] over linkable mentions.
inline Accuracy system_accuracy(const Predictions& predictions, const EvalSet& set) {
  if (predictions.size() != set.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction count does not match mention count");
  }
  Accuracy a;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& r = set.mentions()[i];
    if (!r.linkable()) continue;
    if (!predictions[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "missing prediction for linkable mention " + std::to_string(r.ref.doc) + ":" +
                      std::to_string(r.ref.mention));
    }
    ++a.total;
    if (*predictions[i] == r.gold) ++a.hits;
  }
  return a;
}

inline Accuracy oracle_accuracy(const EvalSet& set, const TypeLabeler& labeler) {
  return system_accuracy(oracle_predictions(set, labeler), set);
}

inline Accuracy oracle_accuracy(const AnnotatedCorpus& corpus, const KnowledgeGraph& graph, const TypeSystem& system,
                                const LinkStats& stats) {
  MembershipCache cache(graph);
  TypeLabeler labeler(cache, system);
  return oracle_accuracy(EvalSet::build(corpus, stats, graph), labeler);
}

struct ObjectiveConfig {
  double lambda = 0.00007;
};

// J = (S_oracle - S_greedy) * Learnability + S_greedy - |A| * lambda.
inline double objective_j(double s_oracle, double s_greedy, double learnability, std::size_t axis_count,
                          const ObjectiveConfig& config) {
  return (s_oracle - s_greedy) * learnability + s_greedy - static_cast<double>(axis_count) * config.lambda;
}

// ---------------------------------------------------------------------------
// Error analysis.

struct ErrorRow {
  std::vector<std::string> gold_type;  // one type name per axis
  std::size_t mentions = 0;
  std::size_t errors = 0;
  std::vector<std::pair<EntityId, std::size_t>> confused;  // wrong picks, most frequent first
};

// Rows sorted by error count desc, then mention count desc, then type tuple.
inline std::vector<ErrorRow> error_analysis(const Predictions& predictions, const EvalSet& set,
                                            const TypeLabeler& labeler, std::size_t top_confused = 5) {
  if (predictions.size() != set.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction count does not match mention count");
  }
  struct Acc {
    std::size_t mentions = 0;
    std::size_t errors = 0;
    std::map<std::uint64_t, std::size_t> confused;
  };
  std::map<std::vector<std::string>, Acc> groups;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& r = set.mentions()[i];
    if (!r.linkable()) continue;
    Acc& g = groups[labeler.label_names(r.gold_index)];
    ++g.mentions;
    if (!predictions[i] || *predictions[i] != r.gold) {
      ++g.errors;
      if (predictions[i]) ++g.confused[raw(*predictions[i])];
    }
  }
  std::vector<ErrorRow> rows;
  for (auto& [key, g] : groups) {
    ErrorRow row;
    row.gold_type = key;
    row.mentions = g.mentions;
    row.errors = g.errors;
    for (const auto& [id, n] : g.confused) row.confused.emplace_back(entity(id), n);
    std::sort(row.confused.begin(), row.confused.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return raw(a.first) < raw(b.first);
    });
    if (row.confused.size() > top_confused) row.confused.resize(top_confused);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ErrorRow& a, const ErrorRow& b) {
    if (a.errors != b.errors) return a.errors > b.errors;
    return a.mentions > b.mentions;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Oracle over subsets of a fixed pool of binary relations.
//
// For every mention the candidates ranked above gold are its competitors; the
// Oracle is right iff each competitor differs from gold on at least one
// selected axis. Competitor difference masks are precomputed once, so one
// evaluation costs a few word ANDs per competitor.

class OracleIndex {
 public:
  OracleIndex(const EvalSet& set, std::span<const DynamicBitset> axis_members) : axis_count_(axis_members.size()) {
    for (const auto& r : set.mentions()) {
      if (!r.linkable()) continue;
      ++total_;
      if (!r.gold_rank) continue;  // always wrong
      if (*r.gold_rank == 0) {
        ++always_;
        continue;
      }
      Contested contested;
      for (std::size_t k = 0; k < *r.gold_rank; ++k) {
        DynamicBitset diff(axis_count_);
        const EntityIndex c = r.candidates[k].index;
        for (std::size_t a = 0; a < axis_count_; ++a) {
          if (axis_members[a].test(c) != axis_members[a].test(r.gold_index)) diff.set(a);
        }
        contested.competitors.push_back(std::move(diff));
      }
      contested_.push_back(std::move(contested));
    }
  }

  std::size_t axis_count() const { return axis_count_; }
  Accuracy greedy() const { return {always_, total_}; }

  // `selected` is a bitset over pool axes.
  Accuracy accuracy(const DynamicBitset& selected) const {
    std::size_t hits = always_;
    for (const auto& m : contested_) {
      bool resolved = true;
      for (const auto& diff : m.competitors) {
        if (!diff.intersects(selected)) {
          resolved = false;
          break;
        }
      }
      if (resolved) ++hits;
    }
    return {hits, total_};
  }

 private:
  struct Contested {
    std::vector<DynamicBitset> competitors;
  };

  std::size_t axis_count_;
  std::size_t total_ = 0;
  std::size_t always_ = 0;
  std::vector<Contested> contested_;
};

}  // namespace typelink

#endif  // TYPELINK_EVALCORE_HPP_
