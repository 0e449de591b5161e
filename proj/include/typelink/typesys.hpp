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

// Relations, Boolean type expressions, type axes and type systems.
//
// A Relation (root, edge) selects every entity that has an `edge` link to the
// root or to any descendant of the root reached downward through the
// relation's transitive kinds. A discovered axis is a single relation with the
// two types "nonmember"/"member"; an authored axis is an ordered rule list
// where the first matching rule wins and "Other" catches the rest.
//
// JSON schema:
//   {"axes": [
//      {"name": "...", "kind": "discovered", "relation": {"root": 12, "edge": "instance_of"}},
//      {"name": "...", "kind": "authored",
//       "rules": [{"type": "woman", "expr": {"op": "and", "args": [...]}}]}]}
//   expr nodes: {"op": "rel", "root": id, "edge": kind}
//               {"op": "and"|"or", "args": [expr, expr, ...]}
//               {"op": "not", "arg": expr}
//   Relations optionally carry "transitive": [kinds] and "include_root": bool.

#ifndef TYPELINK_TYPESYS_HPP_
#define TYPELINK_TYPESYS_HPP_

#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "typelink/base.hpp"
#include "typelink/kg.hpp"

namespace typelink {

using json = nlohmann::json;

inline std::vector<std::string> default_transitive_kinds() {
  return {std::string(edge_kinds::kSubclassOf), std::string(edge_kinds::kWikipediaCategory)};
}

struct Relation {
  EntityId root{};
  std::string edge = std::string(edge_kinds::kInstanceOf);
  std::vector<std::string> transitive = default_transitive_kinds();
  bool include_root = false;

  friend bool operator==(const Relation&, const Relation&) = default;
};

inline Relation make_relation(EntityId root, std::string_view edge) {
  Relation r;
  r.root = root;
  r.edge = std::string(edge);
  return r;
}

// Canonical string identity of a relation; equal relations share a key.
inline std::string relation_key(const Relation& r) {
  std::vector<std::string> kinds = r.transitive;
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  std::string key = std::to_string(raw(r.root)) + "|" + r.edge + "|" + join(kinds, ",");
  if (r.include_root) key += "|self";
  return key;
}

// Members of `relation` as a bitset over graph entity indices. Cycle-safe.
inline DynamicBitset member_set(const KnowledgeGraph& graph, const Relation& relation) {
  const EntityIndex root = graph.index_of(relation.root);
  DynamicBitset members(graph.entity_count());
  const auto membership_kind = graph.find_kind(relation.edge);
  if (!valid_kind_name(relation.edge)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid edge kind '" + relation.edge + "'");
  }
  std::vector<KindId> transitive;
  for (const auto& name : relation.transitive) {
    if (auto k = graph.find_kind(name)) transitive.push_back(*k);
  }
  // Downward closure of the root through the transitive kinds.
  std::vector<bool> visited(graph.entity_count(), false);
  std::vector<EntityIndex> frontier = {root};
  visited[root] = true;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    EntityIndex node = frontier[head];
    for (const auto& link : graph.children(node)) {
      if (visited[link.other]) continue;
      if (std::find(transitive.begin(), transitive.end(), link.kind) == transitive.end()) continue;
      visited[link.other] = true;
      frontier.push_back(link.other);
    }
  }
  if (membership_kind) {
    for (EntityIndex node : frontier) {
      for (const auto& link : graph.children(node)) {
        if (link.kind == *membership_kind) members.set(link.other);
      }
    }
  }
  if (relation.include_root) members.set(root);
  return members;
}

// Members of `relation` as sorted entity ids.
inline std::vector<EntityId> members(const KnowledgeGraph& graph, const Relation& relation) {
  std::vector<EntityId> out;
  for (std::size_t i : member_set(graph, relation).ones()) out.push_back(graph.id_at(static_cast<EntityIndex>(i)));
  std::sort(out.begin(), out.end(), [](EntityId a, EntityId b) { return raw(a) < raw(b); });
  return out;
}

// Thread-safe memo of relation member sets for one graph.
class MembershipCache {
 public:
  explicit MembershipCache(const KnowledgeGraph& graph) : graph_(&graph) {}

  const KnowledgeGraph& graph() const { return *graph_; }

  std::shared_ptr<const DynamicBitset> get(const Relation& relation) const {
    std::string key = relation_key(relation);
    {
      std::shared_lock lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto computed = std::make_shared<const DynamicBitset>(member_set(*graph_, relation));
    std::unique_lock lock(mu_);
    auto [it, inserted] = cache_.emplace(std::move(key), std::move(computed));
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return cache_.size();
  }

 private:
  const KnowledgeGraph* graph_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::shared_ptr<const DynamicBitset>> cache_;
};

// ---------------------------------------------------------------------------
// Boolean expressions.

struct TypeExpr {
  enum class Op { kRel, kAnd, kOr, kNot };

  Op op = Op::kRel;
  Relation relation;           // kRel only
  std::vector<TypeExpr> args;  // one for kNot, at least two for kAnd/kOr

  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

inline TypeExpr rel(Relation r) {
  TypeExpr e;
  e.op = TypeExpr::Op::kRel;
  e.relation = std::move(r);
  return e;
}
inline TypeExpr all_of(std::vector<TypeExpr> args) {
  TypeExpr e;
  e.op = TypeExpr::Op::kAnd;
  e.args = std::move(args);
  return e;
}
inline TypeExpr any_of(std::vector<TypeExpr> args) {
  TypeExpr e;
  e.op = TypeExpr::Op::kOr;
  e.args = std::move(args);
  return e;
}
inline TypeExpr negate(TypeExpr arg) {
  TypeExpr e;
  e.op = TypeExpr::Op::kNot;
  e.args.push_back(std::move(arg));
  return e;
}

inline void validate_expr(const TypeExpr& expr, const std::string& path) {
  switch (expr.op) {
    case TypeExpr::Op::kRel:
      if (!expr.args.empty()) throw Error(ErrorCode::kParse, "relation leaf has children", path);
      if (!valid_kind_name(expr.relation.edge)) {
        throw Error(ErrorCode::kParse, "invalid edge kind '" + expr.relation.edge + "'", path);
      }
      return;
    case TypeExpr::Op::kNot:
      if (expr.args.size() != 1) throw Error(ErrorCode::kParse, "not takes exactly one argument", path);
      validate_expr(expr.args[0], path + ".arg");
      return;
    case TypeExpr::Op::kAnd:
    case TypeExpr::Op::kOr:
      if (expr.args.size() < 2) throw Error(ErrorCode::kParse, "and/or take at least two arguments", path);
      for (std::size_t i = 0; i < expr.args.size(); ++i) {
        validate_expr(expr.args[i], path + ".args[" + std::to_string(i) + "]");
      }
      return;
  }
}

inline void collect_relations(const TypeExpr& expr, std::vector<Relation>& out) {
  if (expr.op == TypeExpr::Op::kRel) {
    out.push_back(expr.relation);
    return;
  }
  for (const auto& a : expr.args) collect_relations(a, out);
}

inline bool eval_expr(const MembershipCache& cache, const TypeExpr& expr, EntityIndex e) {
  switch (expr.op) {
    case TypeExpr::Op::kRel:
      return cache.get(expr.relation)->test(e);
    case TypeExpr::Op::kNot:
      return !eval_expr(cache, expr.args.at(0), e);
    case TypeExpr::Op::kAnd:
      return std::all_of(expr.args.begin(), expr.args.end(),
                         [&](const TypeExpr& a) { return eval_expr(cache, a, e); });
    case TypeExpr::Op::kOr:
      return std::any_of(expr.args.begin(), expr.args.end(),
                         [&](const TypeExpr& a) { return eval_expr(cache, a, e); });
  }
  return false;
}

inline bool eval_expr(const MembershipCache& cache, const TypeExpr& expr, EntityId e) {
  return eval_expr(cache, expr, cache.graph().index_of(e));
}

// ---------------------------------------------------------------------------
// Axes and systems.

inline constexpr std::string_view kOtherType = "Other";
inline constexpr std::string_view kMemberType = "member";
inline constexpr std::string_view kNonmemberType = "nonmember";

struct AuthoredRule {
  std::string type;
  TypeExpr expr;
  friend bool operator==(const AuthoredRule&, const AuthoredRule&) = default;
};

struct TypeAxis {
  enum class Kind { kDiscovered, kAuthored };

  std::string name;
  Kind kind = Kind::kDiscovered;
  Relation relation;               // discovered
  std::vector<AuthoredRule> rules;  // authored

  std::size_t type_count() const { return kind == Kind::kDiscovered ? 2 : rules.size() + 1; }

  // Discovered: 0 = nonmember, 1 = member. Authored: rule order, then Other.
  std::string type_name(std::size_t type) const {
    if (kind == Kind::kDiscovered) return std::string(type == 1 ? kMemberType : kNonmemberType);
    return type < rules.size() ? rules[type].type : std::string(kOtherType);
  }

  friend bool operator==(const TypeAxis&, const TypeAxis&) = default;
};

inline TypeAxis discovered_axis(const KnowledgeGraph& graph, Relation relation) {
  TypeAxis axis;
  axis.kind = TypeAxis::Kind::kDiscovered;
  std::string root_label = graph.contains(relation.root) ? graph.label(relation.root) : std::to_string(raw(relation.root));
  axis.name = relation.edge + "(" + root_label + ")";
  axis.relation = std::move(relation);
  return axis;
}

struct TypeSystem {
  std::vector<TypeAxis> axes;

  bool empty() const { return axes.empty(); }
  std::size_t size() const { return axes.size(); }

  friend bool operator==(const TypeSystem&, const TypeSystem&) = default;
};

inline void validate_system(const TypeSystem& system) {
  std::set<std::string> names;
  for (std::size_t a = 0; a < system.axes.size(); ++a) {
    const TypeAxis& axis = system.axes[a];
    const std::string path = "axes[" + std::to_string(a) + "]";
    if (!names.insert(axis.name).second) {
      throw Error(ErrorCode::kConflict, "duplicate axis name '" + axis.name + "'", path + ".name");
    }
    if (axis.kind == TypeAxis::Kind::kDiscovered) {
      if (!valid_kind_name(axis.relation.edge)) {
        throw Error(ErrorCode::kParse, "invalid edge kind '" + axis.relation.edge + "'", path + ".relation");
      }
      continue;
    }
    std::set<std::string> types;
    for (std::size_t r = 0; r < axis.rules.size(); ++r) {
      const std::string rpath = path + ".rules[" + std::to_string(r) + "]";
      if (axis.rules[r].type == kOtherType || !types.insert(axis.rules[r].type).second) {
        throw Error(ErrorCode::kConflict, "duplicate type name '" + axis.rules[r].type + "'", rpath + ".type");
      }
      validate_expr(axis.rules[r].expr, rpath + ".expr");
    }
  }
}

inline std::vector<Relation> system_relations(const TypeSystem& system) {
  std::vector<Relation> out;
  for (const auto& axis : system.axes) {
    if (axis.kind == TypeAxis::Kind::kDiscovered) {
      out.push_back(axis.relation);
    } else {
      for (const auto& rule : axis.rules) collect_relations(rule.expr, out);
    }
  }
  return out;
}

// Precomputed per-entity type index on every axis of a system.
class TypeLabeler {
 public:
  TypeLabeler(const MembershipCache& cache, TypeSystem system, unsigned workers = 0)
      : graph_(&cache.graph()), system_(std::move(system)) {
    validate_system(system_);
    for (const auto& r : system_relations(system_)) graph_->index_of(r.root);
    const std::size_t n = graph_->entity_count();
    labels_.assign(system_.axes.size(), std::vector<std::uint16_t>(n, 0));
    parallel_for(system_.axes.size(), workers, [&](std::size_t a) {
      const TypeAxis& axis = system_.axes[a];
      auto& out = labels_[a];
      if (axis.kind == TypeAxis::Kind::kDiscovered) {
        auto set = cache.get(axis.relation);
        for (EntityIndex e = 0; e < n; ++e) out[e] = set->test(e) ? 1 : 0;
        return;
      }
      for (EntityIndex e = 0; e < n; ++e) {
        std::size_t type = axis.rules.size();
        for (std::size_t r = 0; r < axis.rules.size(); ++r) {
          if (eval_expr(cache, axis.rules[r].expr, e)) {
            type = r;
            break;
          }
        }
        out[e] = static_cast<std::uint16_t>(type);
      }
    });
  }

  const TypeSystem& system() const { return system_; }
  const KnowledgeGraph& graph() const { return *graph_; }
  std::size_t axis_count() const { return system_.axes.size(); }

  std::size_t label(std::size_t axis, EntityIndex e) const { return labels_[axis][e]; }

  std::vector<std::size_t> labels(EntityIndex e) const {
    std::vector<std::size_t> out(labels_.size());
    for (std::size_t a = 0; a < labels_.size(); ++a) out[a] = labels_[a][e];
    return out;
  }

  bool same_labels(EntityIndex a, EntityIndex b) const {
    for (const auto& axis : labels_) {
      if (axis[a] != axis[b]) return false;
    }
    return true;
  }

  std::vector<std::string> label_names(EntityIndex e) const {
    std::vector<std::string> out;
    out.reserve(labels_.size());
    for (std::size_t a = 0; a < labels_.size(); ++a) out.push_back(system_.axes[a].type_name(labels_[a][e]));
    return out;
  }

  // Number of entities carrying each type, per axis.
  std::vector<std::size_t> type_counts(std::size_t axis) const {
    std::vector<std::size_t> counts(system_.axes[axis].type_count(), 0);
    for (auto t : labels_[axis]) ++counts[t];
    return counts;
  }

 private:
  const KnowledgeGraph* graph_;
  TypeSystem system_;
  std::vector<std::vector<std::uint16_t>> labels_;
};

// One type name per axis for entity `e`.
inline std::vector<std::string> label_entity(const KnowledgeGraph& graph, const TypeSystem& system, EntityId e) {
  if (system.empty()) throw Error(ErrorCode::kInvalidArgument, "type system has no axes");
  EntityIndex index = graph.index_of(e);
  MembershipCache cache(graph);
  std::vector<std::string> out;
  for (const auto& axis : system.axes) {
    if (axis.kind == TypeAxis::Kind::kDiscovered) {
      out.push_back(axis.type_name(cache.get(axis.relation)->test(index) ? 1 : 0));
      continue;
    }
    std::size_t type = axis.rules.size();
    for (std::size_t r = 0; r < axis.rules.size(); ++r) {
      if (eval_expr(cache, axis.rules[r].expr, index)) {
        type = r;
        break;
      }
    }
    out.push_back(axis.type_name(type));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON.

inline json relation_to_json(const Relation& r) {
  json j = {{"root", raw(r.root)}, {"edge", r.edge}};
  if (r.transitive != default_transitive_kinds()) j["transitive"] = r.transitive;
  if (r.include_root) j["include_root"] = true;
  return j;
}

inline json expr_to_json(const TypeExpr& expr) {
  switch (expr.op) {
    case TypeExpr::Op::kRel: {
      json j = {{"op", "rel"}};
      j.update(relation_to_json(expr.relation));
      return j;
    }
    case TypeExpr::Op::kNot:
      return {{"op", "not"}, {"arg", expr_to_json(expr.args.at(0))}};
    case TypeExpr::Op::kAnd:
    case TypeExpr::Op::kOr: {
      json args = json::array();
      for (const auto& a : expr.args) args.push_back(expr_to_json(a));
      return {{"op", expr.op == TypeExpr::Op::kAnd ? "and" : "or"}, {"args", std::move(args)}};
    }
  }
  return {};
}

inline json axis_to_json(const TypeAxis& axis) {
  if (axis.kind == TypeAxis::Kind::kDiscovered) {
    return {{"name", axis.name}, {"kind", "discovered"}, {"relation", relation_to_json(axis.relation)}};
  }
  json rules = json::array();
  for (const auto& rule : axis.rules) rules.push_back({{"type", rule.type}, {"expr", expr_to_json(rule.expr)}});
  return {{"name", axis.name}, {"kind", "authored"}, {"rules", std::move(rules)}};
}

inline json serialize_system(const TypeSystem& system) {
  json axes = json::array();
  for (const auto& axis : system.axes) axes.push_back(axis_to_json(axis));
  return {{"axes", std::move(axes)}};
}

namespace detail {

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "expected an object", path);
}

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                                const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::kParse, "unknown field '" + key + "'", path);
    }
  }
}

inline const json& require_field(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kParse, "missing field '" + key + "'", path);
  return *it;
}

inline std::string require_string(const json& j, const std::string& key, const std::string& path) {
  const json& v = require_field(j, key, path);
  if (!v.is_string()) throw Error(ErrorCode::kParse, "field '" + key + "' must be a string", path + "." + key);
  return v.get<std::string>();
}

// Fills relation fields from an object that may also hold other keys.
inline Relation parse_relation_fields(const json& j, const std::string& path) {
  Relation r;
  const json& root = require_field(j, "root", path);
  if (!root.is_number_unsigned() && !(root.is_number_integer() && root.get<std::int64_t>() >= 0)) {
    throw Error(ErrorCode::kParse, "root must be a non-negative integer", path + ".root");
  }
  r.root = entity(root.get<std::uint64_t>());
  r.edge = require_string(j, "edge", path);
  if (!valid_kind_name(r.edge)) throw Error(ErrorCode::kParse, "invalid edge kind '" + r.edge + "'", path + ".edge");
  if (auto it = j.find("transitive"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorCode::kParse, "transitive must be an array", path + ".transitive");
    r.transitive.clear();
    for (const auto& k : *it) {
      if (!k.is_string() || !valid_kind_name(k.get<std::string>())) {
        throw Error(ErrorCode::kParse, "invalid transitive kind", path + ".transitive");
      }
      r.transitive.push_back(k.get<std::string>());
    }
  }
  if (auto it = j.find("include_root"); it != j.end()) {
    if (!it->is_boolean()) throw Error(ErrorCode::kParse, "include_root must be a boolean", path + ".include_root");
    r.include_root = it->get<bool>();
  }
  return r;
}

}  // namespace detail

inline Relation parse_relation(const json& j, const std::string& path = "relation") {
  detail::require_object(j, path);
  detail::reject_unknown_keys(j, {"root", "edge", "transitive", "include_root"}, path);
  return detail::parse_relation_fields(j, path);
}

inline TypeExpr parse_expr(const json& j, const std::string& path = "expr") {
  detail::require_object(j, path);
  const std::string op = detail::require_string(j, "op", path);
  if (op == "rel") {
    detail::reject_unknown_keys(j, {"op", "root", "edge", "transitive", "include_root"}, path);
    return rel(detail::parse_relation_fields(j, path));
  }
  if (op == "not") {
    detail::reject_unknown_keys(j, {"op", "arg"}, path);
    return negate(parse_expr(detail::require_field(j, "arg", path), path + ".arg"));
  }
  if (op == "and" || op == "or") {
    detail::reject_unknown_keys(j, {"op", "args"}, path);
    const json& args = detail::require_field(j, "args", path);
    if (!args.is_array() || args.size() < 2) {
      throw Error(ErrorCode::kParse, op + " needs an array of at least two args", path + ".args");
    }
    std::vector<TypeExpr> parsed;
    for (std::size_t i = 0; i < args.size(); ++i) {
      parsed.push_back(parse_expr(args[i], path + ".args[" + std::to_string(i) + "]"));
    }
    return op == "and" ? all_of(std::move(parsed)) : any_of(std::move(parsed));
  }
  throw Error(ErrorCode::kParse, "unknown op '" + op + "'", path + ".op");
}

inline TypeSystem parse_system(const json& j) {
  detail::require_object(j, "$");
  detail::reject_unknown_keys(j, {"axes"}, "$");
  const json& axes = detail::require_field(j, "axes", "$");
  if (!axes.is_array()) throw Error(ErrorCode::kParse, "axes must be an array", "axes");
  TypeSystem system;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const std::string path = "axes[" + std::to_string(a) + "]";
    const json& ja = axes[a];
    detail::require_object(ja, path);
    TypeAxis axis;
    axis.name = detail::require_string(ja, "name", path);
    const std::string kind = detail::require_string(ja, "kind", path);
    if (kind == "discovered") {
      detail::reject_unknown_keys(ja, {"name", "kind", "relation"}, path);
      axis.kind = TypeAxis::Kind::kDiscovered;
      axis.relation = parse_relation(detail::require_field(ja, "relation", path), path + ".relation");
    } else if (kind == "authored") {
      detail::reject_unknown_keys(ja, {"name", "kind", "rules"}, path);
      axis.kind = TypeAxis::Kind::kAuthored;
      const json& rules = detail::require_field(ja, "rules", path);
      if (!rules.is_array()) throw Error(ErrorCode::kParse, "rules must be an array", path + ".rules");
      for (std::size_t r = 0; r < rules.size(); ++r) {
        const std::string rpath = path + ".rules[" + std::to_string(r) + "]";
        detail::require_object(rules[r], rpath);
        detail::reject_unknown_keys(rules[r], {"type", "expr"}, rpath);
        axis.rules.push_back({detail::require_string(rules[r], "type", rpath),
                              parse_expr(detail::require_field(rules[r], "expr", rpath), rpath + ".expr")});
      }
    } else {
      throw Error(ErrorCode::kParse, "kind must be 'discovered' or 'authored'", path + ".kind");
    }
    system.axes.push_back(std::move(axis));
  }
  validate_system(system);
  return system;
}

inline TypeSystem load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file", path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what(), path.string());
  }
  return parse_system(j);
}

inline void save_system(const TypeSystem& system, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  out << serialize_system(system).dump(2) << '\n';
}

}  // namespace typelink

#endif  // TYPELINK_TYPESYS_HPP_
