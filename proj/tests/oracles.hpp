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

// Brute-force reference implementations used by the tests. They work from
// the raw edge list and plain containers, never from library indexes.

#ifndef TYPELINK_TESTS_ORACLES_HPP_
#define TYPELINK_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "typelink/typelink.hpp"

namespace oracle {

using typelink::EntityId;
using typelink::raw;

struct RawEdge {
  EntityId child;
  std::string kind;
  EntityId parent;
};

inline std::vector<RawEdge> raw_edges(const typelink::KnowledgeGraph& g) {
  std::vector<RawEdge> out;
  for (const auto& e : g.edges()) out.push_back({g.id_at(e.child), g.kind_name(e.kind), g.id_at(e.parent)});
  return out;
}

// Fixed-point closure over the edge list.
inline std::set<EntityId> members(const typelink::KnowledgeGraph& g, const typelink::Relation& r) {
  const auto edges = raw_edges(g);
  std::set<EntityId> closure = {r.root};
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& e : edges) {
      const bool transitive = std::find(r.transitive.begin(), r.transitive.end(), e.kind) != r.transitive.end();
      if (transitive && closure.contains(e.parent) && closure.insert(e.child).second) grew = true;
    }
  }
  std::set<EntityId> out;
  for (const auto& e : edges) {
    if (e.kind == r.edge && closure.contains(e.parent)) out.insert(e.child);
  }
  if (r.include_root) out.insert(r.root);
  return out;
}

// Depth-first enumeration of simple upward paths from b.
inline bool is_parent(const typelink::KnowledgeGraph& g, EntityId a, EntityId b,
                      const std::vector<std::string>& transitive, const std::vector<std::string>& single_hop) {
  if (a == b) return false;
  const auto edges = raw_edges(g);
  auto in = [](const std::vector<std::string>& v, const std::string& k) {
    return std::find(v.begin(), v.end(), k) != v.end();
  };
  for (const auto& e : edges) {
    if (e.child == b && e.parent == a && in(single_hop, e.kind)) return true;
  }
  std::set<EntityId> on_path = {b};
  std::function<bool(EntityId)> walk = [&](EntityId node) {
    for (const auto& e : edges) {
      if (e.child != node || !in(transitive, e.kind) || on_path.contains(e.parent)) continue;
      if (e.parent == a) return true;
      on_path.insert(e.parent);
      const bool hit = walk(e.parent);
      on_path.erase(e.parent);
      if (hit) return true;
    }
    return false;
  };
  return walk(b);
}

// Truth-table evaluation over precomputed member sets keyed by relation_key.
inline bool eval(const typelink::TypeExpr& expr, const std::map<std::string, std::set<EntityId>>& sets, EntityId e) {
  using Op = typelink::TypeExpr::Op;
  switch (expr.op) {
    case Op::kRel:
      return sets.at(typelink::relation_key(expr.relation)).contains(e);
    case Op::kNot:
      return !eval(expr.args[0], sets, e);
    case Op::kAnd: {
      bool v = true;
      for (const auto& a : expr.args) v = v && eval(a, sets, e);
      return v;
    }
    case Op::kOr: {
      bool v = false;
      for (const auto& a : expr.args) v = v || eval(a, sets, e);
      return v;
    }
  }
  return false;
}

// Fraction of (positive, negative) pairs ordered correctly; ties count half.
inline double pair_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  double good = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return pairs == 0 ? 0.5 : good / static_cast<double>(pairs);
}

// Candidate list of a mention rebuilt from the raw stats row.
inline std::vector<std::pair<EntityId, std::uint64_t>> ranked_row(const typelink::LinkStats& stats,
                                                                  const std::string& mention) {
  std::vector<std::pair<EntityId, std::uint64_t>> row;
  if (const auto* r = stats.find(mention)) {
    for (const auto& lc : *r) row.emplace_back(lc.entity, lc.count);
  }
  // Plain bubble sort keeps the oracle obviously correct.
  for (std::size_t i = 0; i < row.size(); ++i) {
    for (std::size_t j = 0; j + 1 < row.size() - i; ++j) {
      const auto& x = row[j];
      const auto& y = row[j + 1];
      const bool swap = x.second < y.second || (x.second == y.second && raw(x.first) > raw(y.first));
      if (swap) std::swap(row[j], row[j + 1]);
    }
  }
  return row;
}

// Accuracy of LinkCount over linkable mentions.
inline double greedy_accuracy(const typelink::AnnotatedCorpus& corpus, const typelink::LinkStats& stats) {
  std::size_t hits = 0, total = 0;
  for (const auto& doc : corpus.documents) {
    for (const auto& m : doc.mentions) {
      const auto row = ranked_row(stats, typelink::surface(doc, m));
      if (row.empty()) continue;
      ++total;
      if (row.front().first == m.gold) ++hits;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

// Label tuple of an entity: per axis, index of the type it gets.
inline std::vector<std::size_t> label_tuple(const typelink::KnowledgeGraph& g, const typelink::TypeSystem& system,
                                            EntityId e) {
  std::map<std::string, std::set<EntityId>> sets;
  std::function<void(const typelink::TypeExpr&)> collect = [&](const typelink::TypeExpr& x) {
    if (x.op == typelink::TypeExpr::Op::kRel) {
      auto key = typelink::relation_key(x.relation);
      if (!sets.contains(key)) sets[key] = oracle::members(g, x.relation);
    }
    for (const auto& a : x.args) collect(a);
  };
  std::vector<std::size_t> out;
  for (const auto& axis : system.axes) {
    if (axis.kind == typelink::TypeAxis::Kind::kDiscovered) {
      out.push_back(oracle::members(g, axis.relation).contains(e) ? 1 : 0);
      continue;
    }
    std::size_t type = axis.rules.size();
    for (std::size_t r = 0; r < axis.rules.size(); ++r) {
      collect(axis.rules[r].expr);
      if (eval(axis.rules[r].expr, sets, e)) {
        type = r;
        break;
      }
    }
    out.push_back(type);
  }
  return out;
}

// Prune-then-argmax oracle over linkable mentions.
inline double oracle_accuracy(const typelink::AnnotatedCorpus& corpus, const typelink::LinkStats& stats,
                              const typelink::KnowledgeGraph& g, const typelink::TypeSystem& system) {
  std::map<EntityId, std::vector<std::size_t>> labels;
  auto tuple = [&](EntityId e) -> const std::vector<std::size_t>& {
    auto it = labels.find(e);
    if (it == labels.end()) it = labels.emplace(e, label_tuple(g, system, e)).first;
    return it->second;
  };
  std::size_t hits = 0, total = 0;
  for (const auto& doc : corpus.documents) {
    for (const auto& m : doc.mentions) {
      const auto row = ranked_row(stats, typelink::surface(doc, m));
      if (row.empty()) continue;
      ++total;
      std::vector<EntityId> kept;
      for (const auto& [e, c] : row) {
        if (tuple(e) == tuple(m.gold)) kept.push_back(e);
      }
      const EntityId pick = kept.empty() ? row.front().first : kept.front();
      if (pick == m.gold) ++hits;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

// Best J over every subset of a pool with at most 20 axes.
template <typename Objective>
double exhaustive_best(const Objective& objective) {
  const std::size_t n = objective.axis_count();
  double best = -1e300;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    typelink::AxisSet s;
    for (std::uint32_t a = 0; a < n; ++a) {
      if (mask >> a & 1u) s.push_back(a);
    }
    best = std::max(best, objective.compute(s));
  }
  return best;
}

// Max relative error between an analytic gradient and central differences.
template <typename LossFn>
double gradient_check(std::vector<double>& params, const std::vector<double>& analytic, LossFn&& loss, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = loss();
    params[i] = keep - h;
    const double down = loss();
    params[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-5});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

}  // namespace oracle

#endif  // TYPELINK_TESTS_ORACLES_HPP_
