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

// Knowledge graph and mention link statistics, plus their TSV formats:
//
//   entities.tsv   id <TAB> label
//   edges.tsv      child_id <TAB> kind <TAB> parent_id
//   links.tsv      mention <TAB> entity_id <TAB> count
//
// Blank lines and lines starting with '#' are skipped. Both structures are
// immutable once loaded and safe to share between threads.

#ifndef TYPELINK_KG_HPP_
#define TYPELINK_KG_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "typelink/base.hpp"

namespace typelink {

namespace edge_kinds {
inline constexpr std::string_view kInstanceOf = "instance_of";
inline constexpr std::string_view kSubclassOf = "subclass_of";
inline constexpr std::string_view kWikipediaCategory = "wikipedia_category";
inline constexpr std::string_view kIsAListOf = "is_a_list_of";
inline constexpr std::string_view kOccupation = "occupation";
inline constexpr std::string_view kPositionHeld = "position_held";
inline constexpr std::string_view kSeries = "series";
}  // namespace edge_kinds

inline const std::vector<std::string>& builtin_edge_kinds() {
  static const std::vector<std::string> kinds = {
      std::string(edge_kinds::kInstanceOf),  std::string(edge_kinds::kSubclassOf),
      std::string(edge_kinds::kWikipediaCategory), std::string(edge_kinds::kIsAListOf),
      std::string(edge_kinds::kOccupation),  std::string(edge_kinds::kPositionHeld),
      std::string(edge_kinds::kSeries)};
  return kinds;
}

inline bool valid_kind_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

using KindId = std::uint16_t;

class KnowledgeGraph {
 public:
  struct Link {
    KindId kind;
    EntityIndex other;
  };
  struct Edge {
    EntityIndex child;
    KindId kind;
    EntityIndex parent;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  KnowledgeGraph() {
    for (const auto& k : builtin_edge_kinds()) intern_kind(k);
  }

  // Declares an entity; ids must be unique.
  EntityIndex add_entity(EntityId id, std::string label) {
    if (index_.contains(id)) {
      throw Error(ErrorCode::kConflict, "duplicate entity id " + std::to_string(raw(id)));
    }
    auto index = static_cast<EntityIndex>(ids_.size());
    index_.emplace(id, index);
    ids_.push_back(id);
    labels_.push_back(std::move(label));
    parents_.emplace_back();
    children_.emplace_back();
    return index;
  }

  KindId intern_kind(std::string_view name) {
    if (auto k = find_kind(name)) return *k;
    if (!valid_kind_name(name)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid edge kind '" + std::string(name) + "'");
    }
    kind_names_.emplace_back(name);
    return static_cast<KindId>(kind_names_.size() - 1);
  }

  std::optional<KindId> find_kind(std::string_view name) const {
    for (std::size_t i = 0; i < kind_names_.size(); ++i) {
      if (kind_names_[i] == name) return static_cast<KindId>(i);
    }
    return std::nullopt;
  }

  const std::string& kind_name(KindId kind) const { return kind_names_.at(kind); }
  const std::vector<std::string>& kind_names() const { return kind_names_; }

  void add_edge(EntityId child, std::string_view kind, EntityId parent) {
    if (child == parent) {
      throw Error(ErrorCode::kInvalidArgument, "self-loop edge on entity " + std::to_string(raw(child)));
    }
    EntityIndex c = index_of(child);
    EntityIndex p = index_of(parent);
    KindId k = intern_kind(kind);
    std::uint64_t key = (static_cast<std::uint64_t>(c) << 32 | p) ^ (static_cast<std::uint64_t>(k) << 48);
    auto& bucket = edge_set_[key];
    for (std::size_t e : bucket) {
      if (edges_[e].child == c && edges_[e].kind == k && edges_[e].parent == p) {
        throw Error(ErrorCode::kConflict, "duplicate edge " + std::to_string(raw(child)) + " " +
                                              std::string(kind) + " " + std::to_string(raw(parent)));
      }
    }
    bucket.push_back(edges_.size());
    edges_.push_back({c, k, p});
    parents_[c].push_back({k, p});
    children_[p].push_back({k, c});
  }

  std::size_t entity_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<EntityIndex> find(EntityId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(EntityId id) const { return index_.contains(id); }

  EntityIndex index_of(EntityId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw Error(ErrorCode::kNotFound, "undeclared entity " + std::to_string(raw(id)));
    }
    return it->second;
  }

  EntityId id_at(EntityIndex index) const { return ids_[index]; }
  const std::string& label_at(EntityIndex index) const { return labels_[index]; }
  const std::string& label(EntityId id) const { return labels_[index_of(id)]; }

  // Outgoing (child -> parent) and incoming links of an entity.
  std::span<const Link> parents(EntityIndex index) const { return parents_[index]; }
  std::span<const Link> children(EntityIndex index) const { return children_[index]; }

  const std::vector<Edge>& edges() const { return edges_; }

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    if (a.ids_ != b.ids_ || a.labels_ != b.labels_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      const Edge& x = a.edges_[i];
      const Edge& y = b.edges_[i];
      if (x.child != y.child || x.parent != y.parent ||
          a.kind_names_[x.kind] != b.kind_names_[y.kind]) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<EntityId> ids_;
  std::vector<std::string> labels_;
  std::unordered_map<EntityId, EntityIndex> index_;
  std::vector<std::string> kind_names_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> edge_set_;
  std::vector<std::vector<Link>> parents_;
  std::vector<std::vector<Link>> children_;
};

// ---------------------------------------------------------------------------
// Link statistics.

struct LinkCount {
  EntityId entity;
  std::uint64_t count;
  friend bool operator==(const LinkCount&, const LinkCount&) = default;
};

struct Candidate {
  EntityId entity;
  std::uint64_t count;
  double p_link;
};

// Ranking used everywhere a candidate list is ordered: descending count,
// ties by ascending entity id.
inline bool ranks_before(const LinkCount& a, const LinkCount& b) {
  if (a.count != b.count) return a.count > b.count;
  return raw(a.entity) < raw(b.entity);
}

class LinkStats {
 public:
  // Rows are kept sorted by ascending entity id.
  using Row = std::vector<LinkCount>;
  using Table = std::map<std::string, Row, std::less<>>;

  // Adds `count` links from `mention` to `e`, summing with existing rows.
  void add(const std::string& mention, EntityId e, std::uint64_t count) {
    if (count == 0) throw Error(ErrorCode::kInvalidArgument, "link counts must be positive");
    Row& row = table_[mention];
    auto it = std::lower_bound(row.begin(), row.end(), e,
                               [](const LinkCount& lc, EntityId id) { return raw(lc.entity) < raw(id); });
    if (it != row.end() && it->entity == e) {
      it->count += count;
    } else {
      row.insert(it, {e, count});
    }
  }

  // Replaces a whole row. Empty rows remove the mention.
  void set_row(const std::string& mention, Row row) {
    std::sort(row.begin(), row.end(), [](const LinkCount& a, const LinkCount& b) { return raw(a.entity) < raw(b.entity); });
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].count == 0) throw Error(ErrorCode::kInvalidArgument, "link counts must be positive");
      if (i > 0 && row[i].entity == row[i - 1].entity) {
        throw Error(ErrorCode::kConflict, "duplicate entity in row for '" + mention + "'");
      }
    }
    if (row.empty()) {
      table_.erase(mention);
    } else {
      table_[mention] = std::move(row);
    }
  }

  const Row* find(std::string_view mention) const {
    auto it = table_.find(mention);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::uint64_t count(std::string_view mention, EntityId e) const {
    const Row* row = find(mention);
    if (row == nullptr) return 0;
    for (const auto& lc : *row) {
      if (lc.entity == e) return lc.count;
    }
    return 0;
  }

  std::uint64_t total(std::string_view mention) const {
    const Row* row = find(mention);
    std::uint64_t sum = 0;
    if (row != nullptr) {
      for (const auto& lc : *row) sum += lc.count;
    }
    return sum;
  }

  // Candidate set with P_Link, ranked by descending probability. Unknown
  // mentions yield an empty list.
  std::vector<Candidate> candidates(std::string_view mention) const {
    std::vector<Candidate> out;
    const Row* row = find(mention);
    if (row == nullptr) return out;
    Row ranked = *row;
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    const double sum = static_cast<double>(total(mention));
    out.reserve(ranked.size());
    for (const auto& lc : ranked) out.push_back({lc.entity, lc.count, static_cast<double>(lc.count) / sum});
    return out;
  }

  std::size_t mention_count() const { return table_.size(); }
  const Table& table() const { return table_; }

  friend bool operator==(const LinkStats&, const LinkStats&) = default;

 private:
  Table table_;
};

inline std::vector<Candidate> candidates(const LinkStats& stats, std::string_view mention) {
  return stats.candidates(mention);
}

// ---------------------------------------------------------------------------
// TSV I/O.

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file", path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  return out;
}

inline std::string location(const std::string& file, std::size_t line, std::size_t column) {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

inline bool skip_line(std::string_view line) { return line.empty() || line.front() == '#'; }

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Parses the `column`-th field (1-based) as an entity id.
inline EntityId parse_id(std::string_view field, const std::string& file, std::size_t line,
                         std::size_t column) {
  std::uint64_t value = 0;
  if (!parse_number(field, value)) {
    throw Error(ErrorCode::kParse, "expected a non-negative integer id, got '" + std::string(field) + "'",
                location(file, line, column));
  }
  return entity(value);
}

}  // namespace detail

inline void read_entities(std::istream& in, const std::string& name, KnowledgeGraph& graph) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::skip_line(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw Error(ErrorCode::kParse, "expected 2 tab-separated fields, got " + std::to_string(fields.size()),
                  detail::location(name, lineno, 1));
    }
    EntityId id = detail::parse_id(fields[0], name, lineno, 1);
    try {
      graph.add_entity(id, std::string(fields[1]));
    } catch (const Error& e) {
      throw Error(e.code(), e.message(), detail::location(name, lineno, 1));
    }
  }
}

inline void read_edges(std::istream& in, const std::string& name, KnowledgeGraph& graph) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::skip_line(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParse, "expected 3 tab-separated fields, got " + std::to_string(fields.size()),
                  detail::location(name, lineno, 1));
    }
    EntityId child = detail::parse_id(fields[0], name, lineno, 1);
    EntityId parent = detail::parse_id(fields[2], name, lineno, 3);
    if (!valid_kind_name(fields[1])) {
      throw Error(ErrorCode::kParse, "invalid edge kind '" + std::string(fields[1]) + "'",
                  detail::location(name, lineno, 2));
    }
    if (!graph.contains(child)) {
      throw Error(ErrorCode::kNotFound, "unknown entity " + std::to_string(raw(child)),
                  detail::location(name, lineno, 1));
    }
    if (!graph.contains(parent)) {
      throw Error(ErrorCode::kNotFound, "unknown entity " + std::to_string(raw(parent)),
                  detail::location(name, lineno, 3));
    }
    try {
      graph.add_edge(child, fields[1], parent);
    } catch (const Error& e) {
      throw Error(e.code(), e.message(), detail::location(name, lineno, 1));
    }
  }
}

// Loads `entities.tsv` and `edges.tsv` from explicit paths.
inline KnowledgeGraph load_graph(const std::filesystem::path& entities_path,
                                 const std::filesystem::path& edges_path) {
  KnowledgeGraph graph;
  {
    auto in = detail::open_input(entities_path);
    read_entities(in, entities_path.string(), graph);
  }
  {
    auto in = detail::open_input(edges_path);
    read_edges(in, edges_path.string(), graph);
  }
  return graph;
}

// Loads a graph directory containing entities.tsv and edges.tsv.
inline KnowledgeGraph load_graph(const std::filesystem::path& dir) {
  return load_graph(dir / "entities.tsv", dir / "edges.tsv");
}

inline void write_entities(std::ostream& out, const KnowledgeGraph& graph) {
  for (EntityIndex i = 0; i < graph.entity_count(); ++i) {
    out << raw(graph.id_at(i)) << '\t' << graph.label_at(i) << '\n';
  }
}

inline void write_edges(std::ostream& out, const KnowledgeGraph& graph) {
  for (const auto& e : graph.edges()) {
    out << raw(graph.id_at(e.child)) << '\t' << graph.kind_name(e.kind) << '\t' << raw(graph.id_at(e.parent))
        << '\n';
  }
}

inline void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto entities = detail::open_output(dir / "entities.tsv");
  write_entities(entities, graph);
  auto edges = detail::open_output(dir / "edges.tsv");
  write_edges(edges, graph);
}

inline LinkStats read_links(std::istream& in, const std::string& name, const KnowledgeGraph& graph) {
  LinkStats stats;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::skip_line(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParse, "expected 3 tab-separated fields, got " + std::to_string(fields.size()),
                  detail::location(name, lineno, 1));
    }
    if (fields[0].empty()) {
      throw Error(ErrorCode::kParse, "empty mention", detail::location(name, lineno, 1));
    }
    EntityId e = detail::parse_id(fields[1], name, lineno, 2);
    if (!graph.contains(e)) {
      throw Error(ErrorCode::kNotFound, "unknown entity " + std::to_string(raw(e)),
                  detail::location(name, lineno, 2));
    }
    std::int64_t count = 0;
    if (!parse_number(fields[2], count)) {
      throw Error(ErrorCode::kParse, "expected an integer count, got '" + std::string(fields[2]) + "'",
                  detail::location(name, lineno, 3));
    }
    if (count <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "non-positive link count " + std::to_string(count),
                  detail::location(name, lineno, 3));
    }
    stats.add(std::string(fields[0]), e, static_cast<std::uint64_t>(count));
  }
  return stats;
}

inline LinkStats load_links(const std::filesystem::path& path, const KnowledgeGraph& graph) {
  auto in = detail::open_input(path);
  return read_links(in, path.string(), graph);
}

inline void write_links(std::ostream& out, const LinkStats& stats) {
  for (const auto& [mention, row] : stats.table()) {
    for (const auto& lc : row) out << mention << '\t' << raw(lc.entity) << '\t' << lc.count << '\n';
  }
}

inline void save_links(const LinkStats& stats, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_links(out, stats);
}

}  // namespace typelink

#endif  // TYPELINK_KG_HPP_
