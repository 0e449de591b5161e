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

// Small hand-built worlds and random graphs shared by the tests.

#ifndef TYPELINK_TESTS_WORLDS_HPP_
#define TYPELINK_TESTS_WORLDS_HPP_

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "typelink/typelink.hpp"

namespace worlds {

using namespace typelink;

inline Document make_doc(std::string id, std::vector<std::string> tokens, std::vector<Mention> mentions) {
  Document d;
  d.doc_id = std::move(id);
  d.tokens = std::move(tokens);
  d.mentions = std::move(mentions);
  return d;
}

inline Mention mention(std::size_t start, std::size_t end, std::uint64_t gold) {
  Mention m;
  m.start = start;
  m.end = end;
  m.gold = entity(gold);
  return m;
}

// "king" with Charles I holding the position.
struct KingWorld {
  KnowledgeGraph graph;
  LinkStats stats;
  static constexpr std::uint64_t kKing = 1, kCharles = 2;
  KingWorld() {
    graph.add_entity(entity(kKing), "king");
    graph.add_entity(entity(kCharles), "Charles I of England");
    graph.add_edge(entity(kCharles), edge_kinds::kPositionHeld, entity(kKing));
    stats.add("king", entity(kKing), 5000);
    stats.add("king", entity(kCharles), 100);
  }
};

// monarch <- queen_b <- queen_c, monarch <- queen_a; "queen" folds over two
// iterations: 100 -> 110 -> 218.
struct QueenWorld {
  KnowledgeGraph graph;
  LinkStats stats;
  static constexpr std::uint64_t kMonarch = 10, kQueenA = 11, kQueenB = 12, kQueenC = 13;
  QueenWorld() {
    graph.add_entity(entity(kMonarch), "monarch");
    graph.add_entity(entity(kQueenA), "queen_a");
    graph.add_entity(entity(kQueenB), "queen_b");
    graph.add_entity(entity(kQueenC), "queen_c");
    graph.add_edge(entity(kQueenA), edge_kinds::kPositionHeld, entity(kMonarch));
    graph.add_edge(entity(kQueenB), edge_kinds::kPositionHeld, entity(kMonarch));
    graph.add_edge(entity(kQueenC), edge_kinds::kPositionHeld, entity(kQueenB));
    stats.add("queen", entity(kMonarch), 100);
    stats.add("queen", entity(kQueenA), 10);
    stats.add("queen", entity(kQueenB), 105);
    stats.add("queen", entity(kQueenC), 3);
  }
};

// Two cities and a country.
struct CityWorld {
  KnowledgeGraph graph;
  static constexpr std::uint64_t kCity = 1, kParis = 2, kSanFrancisco = 3, kFrance = 4, kCountry = 5;
  CityWorld() {
    graph.add_entity(entity(kCity), "city");
    graph.add_entity(entity(kParis), "Paris");
    graph.add_entity(entity(kSanFrancisco), "San Francisco");
    graph.add_entity(entity(kFrance), "France");
    graph.add_entity(entity(kCountry), "country");
    graph.add_edge(entity(kParis), edge_kinds::kInstanceOf, entity(kCity));
    graph.add_edge(entity(kSanFrancisco), edge_kinds::kInstanceOf, entity(kCity));
    graph.add_edge(entity(kFrance), edge_kinds::kInstanceOf, entity(kCountry));
  }
};

// George Washington and Washington D.C. with IsA and Topic axes.
struct WashingtonWorld {
  KnowledgeGraph graph;
  LinkStats stats;
  TypeSystem system;
  static constexpr std::uint64_t kHuman = 1, kPlace = 2, kCity = 3, kPolitics = 4, kGeography = 5, kGeorge = 6,
                                 kDC = 7, kState = 8;
  WashingtonWorld() {
    graph.add_entity(entity(kHuman), "human");
    graph.add_entity(entity(kPlace), "place");
    graph.add_entity(entity(kCity), "city");
    graph.add_entity(entity(kPolitics), "Category:Politics");
    graph.add_entity(entity(kGeography), "Category:Geography");
    graph.add_entity(entity(kGeorge), "George Washington");
    graph.add_entity(entity(kDC), "Washington, D.C.");
    graph.add_entity(entity(kState), "Washington (state)");
    graph.add_edge(entity(kCity), edge_kinds::kSubclassOf, entity(kPlace));
    graph.add_edge(entity(kGeorge), edge_kinds::kInstanceOf, entity(kHuman));
    graph.add_edge(entity(kDC), edge_kinds::kInstanceOf, entity(kCity));
    graph.add_edge(entity(kState), edge_kinds::kInstanceOf, entity(kPlace));
    graph.add_edge(entity(kGeorge), edge_kinds::kWikipediaCategory, entity(kPolitics));
    graph.add_edge(entity(kDC), edge_kinds::kWikipediaCategory, entity(kGeography));
    graph.add_edge(entity(kState), edge_kinds::kWikipediaCategory, entity(kGeography));
    stats.add("Washington", entity(kDC), 3);
    stats.add("Washington", entity(kGeorge), 1);
    stats.add("Washington", entity(kState), 2);

    TypeAxis isa;
    isa.name = "IsA";
    isa.kind = TypeAxis::Kind::kAuthored;
    isa.rules = {{"Person", rel(make_relation(entity(kHuman), edge_kinds::kInstanceOf))},
                 {"Place", rel(make_relation(entity(kPlace), edge_kinds::kInstanceOf))}};
    TypeAxis topic;
    topic.name = "Topic";
    topic.kind = TypeAxis::Kind::kAuthored;
    topic.rules = {{"Politics", rel(make_relation(entity(kPolitics), edge_kinds::kWikipediaCategory))},
                   {"Geography", rel(make_relation(entity(kGeography), edge_kinds::kWikipediaCategory))}};
    system.axes = {isa, topic};
  }
};

// "jaguar": the car maker is linked more often than the animal.
struct JaguarWorld {
  KnowledgeGraph graph;
  LinkStats stats;
  TypeSystem system;
  static constexpr std::uint64_t kAnimal = 1, kCarMaker = 2, kJaguarAnimal = 3, kJaguarCars = 4;
  JaguarWorld() {
    graph.add_entity(entity(kAnimal), "animal");
    graph.add_entity(entity(kCarMaker), "car manufacturer");
    graph.add_entity(entity(kJaguarAnimal), "jaguar (animal)");
    graph.add_entity(entity(kJaguarCars), "Jaguar Cars");
    graph.add_edge(entity(kJaguarAnimal), edge_kinds::kInstanceOf, entity(kAnimal));
    graph.add_edge(entity(kJaguarCars), edge_kinds::kInstanceOf, entity(kCarMaker));
    stats.add("jaguar", entity(kJaguarCars), 70);
    stats.add("jaguar", entity(kJaguarAnimal), 30);
    system.axes = {discovered_axis(graph, make_relation(entity(kAnimal), edge_kinds::kInstanceOf))};
  }
};

// Random graph over ids 1..n with `edges` distinct non-loop edges.
inline KnowledgeGraph random_graph(Rng& rng, std::size_t n, std::size_t edges, const std::vector<std::string>& kinds) {
  KnowledgeGraph g;
  for (std::size_t i = 1; i <= n; ++i) g.add_entity(entity(i), "e" + std::to_string(i));
  std::size_t added = 0;
  for (std::size_t tries = 0; added < edges && tries < edges * 50; ++tries) {
    const auto c = entity(1 + rng.below(n));
    const auto p = entity(1 + rng.below(n));
    if (c == p) continue;
    try {
      g.add_edge(c, kinds[rng.below(kinds.size())], p);
      ++added;
    } catch (const Error&) {
    }
  }
  return g;
}

// Link stats over a graph: `mentions` surfaces with 1..max_candidates entities.
inline LinkStats random_stats(Rng& rng, const KnowledgeGraph& g, std::size_t mentions, std::size_t max_candidates) {
  LinkStats s;
  for (std::size_t m = 0; m < mentions; ++m) {
    const std::size_t k = 1 + rng.below(max_candidates);
    for (std::size_t i = 0; i < k; ++i) {
      s.add("m" + std::to_string(m), g.id_at(static_cast<EntityIndex>(rng.below(g.entity_count()))),
            1 + rng.below(50));
    }
  }
  return s;
}

// A small synthetic world for fuzzing.
inline SynthConfig small_world_config() {
  SynthConfig c = standard_world_config();
  c.entities = 150;
  c.latent_axes = 4;
  c.decoy_classes = 10;
  c.surface_forms = 60;
  c.documents = 60;
  return c;
}

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() /
           ("typelink_" + name + "_" + std::to_string(std::hash<std::string>{}(name) ^ static_cast<std::size_t>(
                                                                                          ::getpid())));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

// Writes a synthetic world into `dir` the way the CLI does.
inline void write_world(const SyntheticWorld& w, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_graph(w.graph, dir);
  save_links(w.stats, dir / "links.tsv");
  save_corpus(w.corpus, dir / "corpus.jsonl");
  save_system(w.latent_system, dir / "latent_system.json");
}

// Runs a shell command; returns the exit status and combined stdout/stderr.
inline std::pair<int, std::string> run_command(const std::string& command) {
  std::string out;
  FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return {-1, out};
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace worlds

#endif  // TYPELINK_TESTS_WORLDS_HPP_
