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

// "jaguar": link counts favour the car maker; a confident animal belief
// from the type classifier flips the decision.

#include <iostream>

#include "typelink/typelink.hpp"

int main() {
  using namespace typelink;
  KnowledgeGraph graph;
  graph.add_entity(entity(1), "animal");
  graph.add_entity(entity(2), "car manufacturer");
  graph.add_entity(entity(3), "jaguar (animal)");
  graph.add_entity(entity(4), "Jaguar Cars");
  graph.add_edge(entity(3), edge_kinds::kInstanceOf, entity(1));
  graph.add_edge(entity(4), edge_kinds::kInstanceOf, entity(2));

  LinkStats stats;
  stats.add("jaguar", entity(4), 70);
  stats.add("jaguar", entity(3), 30);

  TypeSystem system;
  TypeAxis isa;
  isa.name = "IsA";
  isa.kind = TypeAxis::Kind::kAuthored;
  isa.rules = {{"Animal", rel(make_relation(entity(1), edge_kinds::kInstanceOf))},
               {"Vehicle", rel(make_relation(entity(2), edge_kinds::kInstanceOf))}};
  system.axes = {isa};

  AnnotatedCorpus corpus;
  Document doc;
  doc.doc_id = "rainforest";
  doc.tokens = {"the", "jaguar", "stalked", "its", "prey"};
  Mention m;
  m.start = 1;
  m.end = 2;
  m.gold = entity(3);
  doc.mentions = {m};
  corpus.documents = {doc};

  MembershipCache cache(graph);
  TypeLabeler labeler(cache, system);
  const EvalSet set = EvalSet::build(corpus, stats, graph);

  // Per-token beliefs over {Animal, Vehicle, Other}; only the mention token matters.
  BeliefSequence beliefs(doc.tokens.size(), {{0.34, 0.33, 0.33}});
  beliefs[1] = {{0.9, 0.05, 0.05}};

  const auto decisions = link(set, {beliefs}, labeler, SmoothingParams{{0.9}, 0.9});
  std::cout << "link counts pick: " << graph.label(greedy_predictions(set)[0].value()) << "\n";
  for (const auto& s : decisions[0]->ranked) {
    std::cout << "  " << graph.label(s.entity) << "  score " << s.score << "  type "
              << label_entity(graph, system, s.entity)[0] << "\n";
  }
  std::cout << "typed linker picks: " << graph.label(decisions[0]->chosen) << "\n";
}
