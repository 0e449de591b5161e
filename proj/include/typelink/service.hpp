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

// Design sessions: a loaded world plus an authored type system, evaluated on
// demand. Every method returns a status code and a JSON body so the HTTP
// layer (http.hpp) stays a thin router. The batch `evaluate` command builds
// its output with the same evaluation_to_json.
//
// J for an authored system uses learnability 1: hand-written rules are taken
// as learnable, so J = S_oracle - |A| * lambda.

#ifndef TYPELINK_SERVICE_HPP_
#define TYPELINK_SERVICE_HPP_

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "typelink/base.hpp"
#include "typelink/corpus.hpp"
#include "typelink/evalcore.hpp"
#include "typelink/kg.hpp"
#include "typelink/learnability.hpp"
#include "typelink/search.hpp"
#include "typelink/typesys.hpp"

namespace typelink {

struct WorldPaths {
  std::filesystem::path graph;  // directory with entities.tsv and edges.tsv
  std::filesystem::path links;
  std::filesystem::path corpus;
};

// Immutable once built. The cache points at `graph`, so a World never moves.
struct World {
  KnowledgeGraph graph;
  LinkStats stats;
  AnnotatedCorpus corpus;
  std::unique_ptr<MembershipCache> cache;
  EvalSet set;

  World() = default;
  World(const World&) = delete;
  World& operator=(const World&) = delete;
};

inline std::shared_ptr<World> make_world(KnowledgeGraph graph, LinkStats stats, AnnotatedCorpus corpus) {
  auto w = std::make_shared<World>();
  w->graph = std::move(graph);
  w->stats = std::move(stats);
  w->corpus = std::move(corpus);
  w->cache = std::make_unique<MembershipCache>(w->graph);
  w->set = EvalSet::build(w->corpus, w->stats, w->graph);
  return w;
}

inline std::shared_ptr<World> load_world(const WorldPaths& paths) {
  for (const auto& p : {paths.graph, paths.links, paths.corpus}) {
    if (!std::filesystem::exists(p)) throw Error(ErrorCode::kIo, "no such file or directory", p.string());
  }
  KnowledgeGraph graph = load_graph(paths.graph);
  LinkStats stats = load_links(paths.links, graph);
  AnnotatedCorpus corpus = load_corpus(paths.corpus);
  return make_world(std::move(graph), std::move(stats), std::move(corpus));
}

// ---------------------------------------------------------------------------
// Evaluation.

struct AxisSummary {
  std::string name;
  std::vector<std::pair<std::string, std::size_t>> types;  // type name, entity count
};

struct Evaluation {
  Accuracy s_greedy;
  Accuracy s_oracle;
  double j = 0.0;
  double lambda = 0.0;
  Accuracy gold_recall;
  std::size_t linkable = 0;
  std::size_t unlinkable = 0;
  std::vector<AxisSummary> axes;
  std::vector<ErrorRow> errors;
  double timing_ms = 0.0;
};

inline Evaluation evaluate_rules(const World& world, const TypeSystem& system, double lambda) {
  const auto t0 = std::chrono::steady_clock::now();
  Evaluation ev;
  TypeLabeler labeler(*world.cache, system, 1);
  ev.lambda = lambda;
  ev.s_greedy = s_greedy(world.set);
  const Predictions oracle = oracle_predictions(world.set, labeler);
  ev.s_oracle = system_accuracy(oracle, world.set);
  ev.j = objective_j(ev.s_oracle.value(), ev.s_greedy.value(), 1.0, system.axes.size(), {lambda});
  ev.gold_recall = world.set.gold_recall();
  ev.linkable = world.set.linkable_count();
  ev.unlinkable = world.set.unlinkable_count();
  for (std::size_t a = 0; a < system.axes.size(); ++a) {
    AxisSummary s;
    s.name = system.axes[a].name;
    const auto counts = labeler.type_counts(a);
    for (std::size_t t = 0; t < counts.size(); ++t) s.types.emplace_back(system.axes[a].type_name(t), counts[t]);
    ev.axes.push_back(std::move(s));
  }
  for (auto& row : error_analysis(oracle, world.set, labeler)) {
    if (row.errors > 0) ev.errors.push_back(std::move(row));
  }
  ev.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return ev;
}

inline constexpr std::size_t kErrorPageSize = 50;

inline nlohmann::json error_row_to_json(const ErrorRow& row) {
  nlohmann::json confused = nlohmann::json::array();
  for (const auto& [e, n] : row.confused) confused.push_back({{"entity", raw(e)}, {"count", n}});
  return {{"group", join(row.gold_type, "|")},
          {"gold_type", row.gold_type},
          {"mentions", row.mentions},
          {"errors", row.errors},
          {"confused", std::move(confused)}};
}

inline nlohmann::json accuracy_to_json(const Accuracy& a) {
  return {{"hits", a.hits}, {"total", a.total}, {"value", a.value()}};
}

inline nlohmann::json evaluation_to_json(const Evaluation& ev) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : ev.axes) {
    nlohmann::json types = nlohmann::json::array();
    for (const auto& [name, n] : a.types) types.push_back({{"type", name}, {"members", n}});
    axes.push_back({{"name", a.name}, {"types", std::move(types)}});
  }
  nlohmann::json errors = nlohmann::json::array();
  for (std::size_t i = 0; i < ev.errors.size() && i < kErrorPageSize; ++i) errors.push_back(error_row_to_json(ev.errors[i]));
  return {{"s_greedy", ev.s_greedy.value()},
          {"s_oracle", ev.s_oracle.value()},
          {"j", ev.j},
          {"lambda", ev.lambda},
          {"learnability", 1.0},
          {"greedy", accuracy_to_json(ev.s_greedy)},
          {"oracle", accuracy_to_json(ev.s_oracle)},
          {"gold_recall", ev.gold_recall.value()},
          {"linkable", ev.linkable},
          {"unlinkable", ev.unlinkable},
          {"axes", std::move(axes)},
          {"errors", std::move(errors)},
          {"error_groups", ev.errors.size()},
          {"timing_ms", ev.timing_ms}};
}

struct WhatIf {
  double delta_s_oracle = 0.0;
  double delta_j = 0.0;
  std::size_t members = 0;
  std::optional<AxisLearnability> learnability;
};

// Deltas of adding `relation` as one more discovered axis. Never mutates.
inline WhatIf whatif_axis(const World& world, const TypeSystem& system, const Relation& relation, double lambda,
                          bool estimate_learnability = true, std::uint64_t seed = 0) {
  world.graph.index_of(relation.root);
  TypeSystem extended = system;
  TypeAxis axis = discovered_axis(world.graph, relation);
  std::string name = axis.name;
  for (int k = 2; std::any_of(extended.axes.begin(), extended.axes.end(),
                              [&](const TypeAxis& a) { return a.name == name; });
       ++k) {
    name = axis.name + "#" + std::to_string(k);
  }
  axis.name = name;
  extended.axes.push_back(std::move(axis));
  const Evaluation base = evaluate_rules(world, system, lambda);
  const Evaluation with = evaluate_rules(world, extended, lambda);
  WhatIf w;
  w.delta_s_oracle = with.s_oracle.value() - base.s_oracle.value();
  w.delta_j = with.j - base.j;
  w.members = world.cache->get(relation)->count();
  if (estimate_learnability) {
    LearnabilityConfig config;
    config.workers = 1;
    std::vector<Relation> one = {relation};
    w.learnability = learnability(one, world.corpus, *world.cache, config, seed).axes.front();
  }
  return w;
}

// ---------------------------------------------------------------------------
// Sessions.

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

inline nlohmann::json error_body(ErrorCode code, const std::string& message, const std::string& path = {}) {
  return {{"error", {{"code", std::string(error_code_name(code))}, {"message", message}, {"path", path}}}};
}

class DesignService {
 public:
  struct Options {
    double default_lambda = 0.00007;
    bool estimate_learnability = true;
  };

  DesignService() = default;
  explicit DesignService(Options options) : options_(options) {}

  ServiceResponse health() const { return {200, {{"status", "ok"}, {"version", std::string(kVersion)}}}; }

  // Body: {"graph": dir, "links": file, "corpus": file, "lambda"?: x, "system"?: {...}}.
  ServiceResponse create_session(const nlohmann::json& body) {
    return guarded([&]() -> ServiceResponse {
      if (!body.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object", "$");
      WorldPaths paths;
      paths.graph = detail::require_string(body, "graph", "$");
      paths.links = detail::require_string(body, "links", "$");
      paths.corpus = detail::require_string(body, "corpus", "$");
      double lambda = options_.default_lambda;
      if (body.contains("lambda")) {
        if (!body["lambda"].is_number()) throw Error(ErrorCode::kParse, "lambda must be a number", "$.lambda");
        lambda = body["lambda"].get<double>();
      }
      auto world = load_world(paths);
      TypeSystem system;
      if (body.contains("system")) system = parse_system(body["system"]);
      return open(std::move(world), std::move(system), lambda);
    });
  }

  // In-process session over an already built world.
  ServiceResponse open(std::shared_ptr<World> world, TypeSystem system, double lambda) {
    return guarded([&]() -> ServiceResponse {
      TypeLabeler check(*world->cache, system, 1);
      (void)check;
      auto s = std::make_shared<Session>();
      s->world = std::move(world);
      s->system = std::move(system);
      s->lambda = lambda;
      std::string id;
      {
        std::unique_lock lock(mu_);
        id = "s" + std::to_string(++next_id_);
        s->id = id;
        sessions_[id] = s;
      }
      ServiceResponse r = describe(*s);
      r.status = 201;
      return r;
    });
  }

  ServiceResponse get_session(const std::string& id) const {
    auto s = find(id);
    if (!s) return missing(id);
    return describe(*s);
  }

  ServiceResponse put_rules(const std::string& id, const nlohmann::json& body) {
    auto s = find(id);
    if (!s) return missing(id);
    return guarded([&]() -> ServiceResponse {
      TypeSystem system = parse_system(body);
      Evaluation ev = evaluate_rules(*s->world, system, s->lambda);
      std::unique_lock lock(s->mu);
      s->system = std::move(system);
      s->version += 1;
      s->last = ev;
      nlohmann::json out = evaluation_to_json(ev);
      out["version"] = s->version;
      return {200, std::move(out)};
    });
  }

  ServiceResponse evaluate(const std::string& id) const {
    auto s = find(id);
    if (!s) return missing(id);
    return guarded([&]() -> ServiceResponse {
      auto [system, version] = snapshot(*s);
      nlohmann::json out = evaluation_to_json(evaluate_rules(*s->world, system, s->lambda));
      out["version"] = version;
      return {200, std::move(out)};
    });
  }

  // Body: relation JSON.
  ServiceResponse whatif(const std::string& id, const nlohmann::json& body) const {
    auto s = find(id);
    if (!s) return missing(id);
    return guarded([&]() -> ServiceResponse {
      Relation relation = parse_relation(body, "$");
      auto [system, version] = snapshot(*s);
      WhatIf w = whatif_axis(*s->world, system, relation, s->lambda, options_.estimate_learnability);
      nlohmann::json out = {{"relation", relation_to_json(relation)},
                            {"delta_s_oracle", w.delta_s_oracle},
                            {"delta_j", w.delta_j},
                            {"members", w.members},
                            {"version", version}};
      if (w.learnability) {
        out["learnability"] = {{"auc_mean", w.learnability->mean}, {"auc_std", w.learnability->std}};
      } else {
        out["learnability"] = nullptr;
      }
      return {200, std::move(out)};
    });
  }

  // Relations whose root id, label or edge contains `query` (case-insensitive).
  ServiceResponse relations(const std::string& id, const std::string& query, std::size_t limit = 50) const {
    auto s = find(id);
    if (!s) return missing(id);
    return guarded([&]() -> ServiceResponse {
      const World& w = *s->world;
      std::call_once(s->relations_once, [&] {
        PoolOptions options;
        options.edges = builtin_edge_kinds();
        for (auto& r : enumerate_relations(w.graph, options)) {
          s->relation_list.push_back({r, w.cache->get(r)->count()});
        }
      });
      const std::string q = lower(query);
      nlohmann::json items = nlohmann::json::array();
      std::size_t matched = 0;
      for (const auto& [r, n] : s->relation_list) {
        const std::string hay =
            lower(std::to_string(raw(r.root)) + " " + w.graph.label(r.root) + " " + r.edge);
        if (!q.empty() && hay.find(q) == std::string::npos) continue;
        ++matched;
        if (items.size() >= limit) continue;
        items.push_back({{"root", raw(r.root)}, {"label", w.graph.label(r.root)}, {"edge", r.edge}, {"members", n}});
      }
      return {200, {{"query", query}, {"matched", matched}, {"relations", std::move(items)}}};
    });
  }

  // Error rows of the current system; `group` filters by "type|type|...".
  ServiceResponse errors(const std::string& id, const std::string& group, std::size_t page = 0) const {
    auto s = find(id);
    if (!s) return missing(id);
    return guarded([&]() -> ServiceResponse {
      auto [system, version] = snapshot(*s);
      std::optional<Evaluation> ev;
      {
        std::shared_lock lock(s->mu);
        if (s->last && s->version == version) ev = s->last;
      }
      if (!ev) ev = evaluate_rules(*s->world, system, s->lambda);
      std::vector<const ErrorRow*> rows;
      for (const auto& r : ev->errors) {
        if (group.empty() || join(r.gold_type, "|") == group) rows.push_back(&r);
      }
      nlohmann::json items = nlohmann::json::array();
      for (std::size_t i = page * kErrorPageSize; i < rows.size() && i < (page + 1) * kErrorPageSize; ++i) {
        items.push_back(error_row_to_json(*rows[i]));
      }
      const std::size_t pages = (rows.size() + kErrorPageSize - 1) / kErrorPageSize;
      return {200, {{"page", page}, {"pages", pages}, {"total", rows.size()}, {"rows", std::move(items)},
                    {"version", version}}};
    });
  }

  std::size_t session_count() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
  }

 private:
  struct Session {
    std::string id;
    std::shared_ptr<World> world;
    double lambda = 0.0;
    mutable std::shared_mutex mu;
    TypeSystem system;
    std::uint64_t version = 0;
    std::optional<Evaluation> last;
    std::once_flag relations_once;
    std::vector<std::pair<Relation, std::size_t>> relation_list;
  };

  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  static std::pair<TypeSystem, std::uint64_t> snapshot(const Session& s) {
    std::shared_lock lock(s.mu);
    return {s.system, s.version};
  }

  ServiceResponse describe(const Session& s) const {
    auto [system, version] = snapshot(s);
    const World& w = *s.world;
    return {200,
            {{"id", s.id},
             {"version", version},
             {"lambda", s.lambda},
             {"entities", w.graph.entity_count()},
             {"mentions", w.set.size()},
             {"documents", w.corpus.documents.size()},
             {"system", serialize_system(system)}}};
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  static ServiceResponse missing(const std::string& id) {
    return {404, error_body(ErrorCode::kNotFound, "no session " + id, "id")};
  }

  template <typename Fn>
  static ServiceResponse guarded(Fn&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      return {400, error_body(e.code(), e.message(), e.path())};
    } catch (const nlohmann::json::exception& e) {
      return {400, error_body(ErrorCode::kParse, e.what())};
    }
  }

  Options options_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 0;
};

}  // namespace typelink

#endif  // TYPELINK_SERVICE_HPP_
