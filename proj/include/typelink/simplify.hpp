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

// Anaphora link simplification. Links from a mention to a specific entity B
// are folded into a co-candidate A when A is more linked than B and A is a
// parent of B. A is a parent of B when B reaches A through one or more
// instance_of / subclass_of / is_a_list_of edges, or through exactly one
// occupation / position_held / series edge.
//
// Each iteration compares against the counts at the start of the iteration,
// so the result does not depend on mention or candidate order. Iterations
// repeat until one performs no replacement.

#ifndef TYPELINK_SIMPLIFY_HPP_
#define TYPELINK_SIMPLIFY_HPP_

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/kg.hpp"

namespace typelink {

struct SimplifyConfig {
  std::vector<std::string> transitive_kinds = {std::string(edge_kinds::kInstanceOf),
                                               std::string(edge_kinds::kSubclassOf),
                                               std::string(edge_kinds::kIsAListOf)};
  std::vector<std::string> single_hop_kinds = {std::string(edge_kinds::kOccupation),
                                               std::string(edge_kinds::kPositionHeld),
                                               std::string(edge_kinds::kSeries)};
  std::size_t max_depth = 16;
  unsigned workers = 1;
};

class ParentOracle {
 public:
  ParentOracle(const KnowledgeGraph& graph, const SimplifyConfig& config) : graph_(&graph), max_depth_(config.max_depth) {
    for (const auto& k : config.transitive_kinds) {
      if (auto id = graph.find_kind(k)) transitive_.push_back(*id);
    }
    for (const auto& k : config.single_hop_kinds) {
      if (auto id = graph.find_kind(k)) single_hop_.push_back(*id);
    }
  }

  // True iff `a` is a parent of `b`.
  bool is_parent(EntityIndex a, EntityIndex b) const {
    if (a == b) return false;
    for (const auto& link : graph_->parents(b)) {
      if (link.other == a && contains(single_hop_, link.kind)) return true;
    }
    // Breadth-first upward walk through transitive kinds.
    std::vector<EntityIndex> frontier = {b};
    std::unordered_map<EntityIndex, bool> seen = {{b, true}};
    for (std::size_t depth = 0; depth < max_depth_ && !frontier.empty(); ++depth) {
      std::vector<EntityIndex> next;
      for (EntityIndex node : frontier) {
        for (const auto& link : graph_->parents(node)) {
          if (!contains(transitive_, link.kind)) continue;
          if (link.other == a) return true;
          if (seen.emplace(link.other, true).second) next.push_back(link.other);
        }
      }
      frontier = std::move(next);
    }
    return false;
  }

 private:
  static bool contains(const std::vector<KindId>& kinds, KindId k) {
    return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
  }

  const KnowledgeGraph* graph_;
  std::size_t max_depth_;
  std::vector<KindId> transitive_;
  std::vector<KindId> single_hop_;
};

inline bool is_parent(const KnowledgeGraph& graph, EntityId a, EntityId b, const SimplifyConfig& config = {}) {
  EntityIndex ia = graph.index_of(a);
  EntityIndex ib = graph.index_of(b);
  if (ia == ib) throw Error(ErrorCode::kInvalidArgument, "is_parent needs two distinct entities");
  return ParentOracle(graph, config).is_parent(ia, ib);
}

struct PolysemyStats {
  double mean_senses = 0.0;         // over polysemous mentions; 0 when there are none
  bool has_polysemous = false;
  std::size_t polysemous_mentions = 0;
  std::map<std::size_t, std::size_t> histogram;  // senses -> mentions, all mentions
};

inline PolysemyStats polysemy_stats(const LinkStats& stats) {
  PolysemyStats out;
  std::size_t senses = 0;
  for (const auto& [mention, row] : stats.table()) {
    ++out.histogram[row.size()];
    if (row.size() >= 2) {
      ++out.polysemous_mentions;
      senses += row.size();
    }
  }
  out.has_polysemous = out.polysemous_mentions > 0;
  if (out.has_polysemous) {
    out.mean_senses = static_cast<double>(senses) / static_cast<double>(out.polysemous_mentions);
  }
  return out;
}

struct SimplificationStep {
  std::size_t step = 0;
  std::size_t replacements = 0;
  std::uint64_t links_changed = 0;
};

struct SimplificationReport {
  std::vector<SimplificationStep> steps;
  PolysemyStats before;
  PolysemyStats after;
  // mention -> (folded entity -> entity now holding its links)
  std::map<std::string, std::map<EntityId, EntityId>, std::less<>> redirects;
};

namespace detail {

struct RowRewrite {
  LinkStats::Row row;
  std::size_t replacements = 0;
  std::uint64_t links_changed = 0;
  std::vector<std::pair<EntityId, EntityId>> moved;  // (folded, sink)
};

// One snapshot iteration on a single mention row.
inline RowRewrite simplify_row(const LinkStats::Row& row, const KnowledgeGraph& graph, const ParentOracle& parents) {
  RowRewrite out;
  const std::size_t n = row.size();
  std::vector<EntityIndex> index(n);
  for (std::size_t i = 0; i < n; ++i) index[i] = graph.index_of(row[i].entity);
  // target[i]: co-candidate that absorbs i this iteration.
  std::vector<std::optional<std::size_t>> target(n);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t a = 0; a < n; ++a) {
      if (a == b || row[a].count <= row[b].count) continue;
      if (!parents.is_parent(index[a], index[b])) continue;
      // Most-linked parent wins; ties by ascending id (rows are id-sorted).
      if (!target[b] || row[a].count > row[*target[b]].count) target[b] = a;
    }
  }
  // Merges chain toward strictly larger counts, so following targets ends.
  std::vector<std::uint64_t> mass(n, 0);
  for (std::size_t b = 0; b < n; ++b) {
    std::size_t sink = b;
    while (target[sink]) sink = *target[sink];
    mass[sink] += row[b].count;
    if (target[b]) {
      out.moved.emplace_back(row[b].entity, row[sink].entity);
      ++out.replacements;
      out.links_changed += row[b].count;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!target[i]) out.row.push_back({row[i].entity, mass[i]});
  }
  return out;
}

}  // namespace detail

inline std::pair<LinkStats, SimplificationReport> simplify(const LinkStats& stats, const KnowledgeGraph& graph,
                                                           const SimplifyConfig& config = {}) {
  ParentOracle parents(graph, config);
  SimplificationReport report;
  report.before = polysemy_stats(stats);
  LinkStats current = stats;
  for (std::size_t step = 1;; ++step) {
    std::vector<const std::string*> mentions;
    std::vector<const LinkStats::Row*> rows;
    for (const auto& [m, row] : current.table()) {
      mentions.push_back(&m);
      rows.push_back(&row);
    }
    std::vector<detail::RowRewrite> rewrites(rows.size());
    parallel_for(rows.size(), config.workers,
                 [&](std::size_t i) { rewrites[i] = detail::simplify_row(*rows[i], graph, parents); });
    SimplificationStep summary;
    summary.step = step;
    LinkStats next;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      summary.replacements += rewrites[i].replacements;
      summary.links_changed += rewrites[i].links_changed;
      if (!rewrites[i].moved.empty()) {
        auto& redirect = report.redirects[*mentions[i]];
        for (const auto& [from, to] : rewrites[i].moved) {
          for (auto& [earlier, sink] : redirect) {
            if (sink == from) sink = to;
          }
          redirect[from] = to;
        }
      }
      next.set_row(*mentions[i], std::move(rewrites[i].row));
    }
    report.steps.push_back(summary);
    current = std::move(next);
    if (summary.replacements == 0) break;
  }
  report.after = polysemy_stats(current);
  return {std::move(current), std::move(report)};
}

// Rewrites corpus gold entities that simplification folded into a parent,
// as the anchor links themselves would be. Returns the number of mentions changed.
inline std::size_t apply_redirects(AnnotatedCorpus& corpus, const SimplificationReport& report) {
  std::size_t changed = 0;
  for (auto& doc : corpus.documents) {
    for (auto& m : doc.mentions) {
      auto row = report.redirects.find(surface(doc, m));
      if (row == report.redirects.end()) continue;
      auto it = row->second.find(m.gold);
      if (it == row->second.end()) continue;
      m.gold = it->second;
      ++changed;
    }
  }
  return changed;
}

inline void write_simplification_report(std::ostream& out, const SimplificationReport& report) {
  out << "step\treplacements\tlinks_changed\n";
  for (const auto& s : report.steps) out << s.step << '\t' << s.replacements << '\t' << s.links_changed << '\n';
}

}  // namespace typelink

#endif  // TYPELINK_SIMPLIFY_HPP_
